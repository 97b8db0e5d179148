#pragma once

#include "caloric/bernstein.hpp"
#include "caloric/spectral_grid.hpp"

#include <string>

namespace caloric {

enum class SemigroupKind { gauss_weierstrass, subordinated, generalized_power };

/// A semigroup family without its time parameter: the Fourier symbol is
/// exp(-t g(|xi|^2)) with g = identity, a Bernstein function f, or lambda^beta.
struct SemigroupFamily {
    SemigroupKind kind = SemigroupKind::gauss_weierstrass;
    BernsteinFunction f;
    double beta = 1.0;

    static SemigroupFamily gauss_weierstrass();
    static SemigroupFamily subordinated(BernsteinFunction f);
    static SemigroupFamily generalized_power(double beta);

    /// g(lambda) of the symbol exp(-t g(|xi|^2)).
    double exponent(double lambda) const;
    /// True when the kernel is a probability density (Bernstein kinds).
    bool is_markovian() const;
    std::string label() const;
};

struct SemigroupSpec {
    SemigroupFamily family;
    double time_t = 1.0;

    double multiplier(double xi_abs) const;
};

/// F^{-1}(exp(-t g(|xi|^2)) F u). Throws NonFiniteError on a non-finite symbol.
SpectralField apply(const SemigroupSpec& spec, const SpectralField& u);

/// Same as apply() but on a frequency-representation field, returning frequency values.
SpectralField apply_spectral(const SemigroupSpec& spec, const SpectralField& spectrum);

/// sup-norm of W_t W_s u - W_{t+s} u on the grid.
double semigroup_property_check(const SemigroupFamily& family, double t, double s, const SpectralField& u);

/// Physical-space kernel g_t sampled at the grid points x_i = -L + i dx,
/// normalized so that its grid quadrature equals the symbol at xi = 0.
/// Throws AliasingError when the symbol at the Nyquist frequency exceeds 1e-8.
SpectralField kernel_extract(const SemigroupSpec& spec, const TorusGrid& grid);

/// Circular convolution dx^n sum_m K(x_i - x_m) u(x_m) with a kernel from kernel_extract.
SpectralField convolve_with_kernel(const SpectralField& kernel, const SpectralField& u);

struct PositivityReport {
    double min_value;
    /// int (negative part) / int |kernel|.
    double negative_mass_fraction;
};

PositivityReport positivity_probe(const SemigroupSpec& spec, const TorusGrid& grid);

/// Applies the lifting multiplier (1 + |xi|^2)^{r/2}.
SpectralField lift(const SpectralField& u, double r);

}  // namespace caloric
