"""Subordinated heat semigroups on the periodic box, their kernels and smoothing estimates."""

from ._caloric import (
    AliasingError,
    BernsteinFunction,
    BracketError,
    ConfigError,
    DomainError,
    Error,
    NonFiniteError,
    QuadratureError,
    RepresentationError,
    ResolutionError,
    SemigroupFamily,
    TorusGrid,
    UnsupportedFunction,
    apply,
    drift,
    experiment_kinds,
    exponent_fit,
    gamma_ratio,
    kernel,
    log1p,
    lp_norm,
    moment_sandwich,
    negative_moment,
    norm,
    positivity,
    power,
    relativistic,
    run_config,
    sample_stable,
    solve_mild,
    stable,
    stable_moment,
    stable_negative_moment_quadrature,
    validate_config,
)

__version__ = "0.1.0"
__all__ = [name for name in dir() if not name.startswith("_")]
