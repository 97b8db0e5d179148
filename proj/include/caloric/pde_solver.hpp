#pragma once

#include "caloric/lp_norms.hpp"
#include "caloric/spectral_grid.hpp"

#include <functional>
#include <string>
#include <vector>

namespace caloric {

/// du/dt + (-Delta)^beta u = div[u^2] on the torus, u(0) = u0, over [0, T] in t_steps slices.
struct CauchyProblem {
    double beta = 1.0;
    SpectralField u0;
    double T = 1.0;
    int t_steps = 64;
    /// Admits 0 < beta < 1, for which nothing is guaranteed.
    bool experimental = false;

    const TorusGrid& grid() const noexcept { return u0.grid(); }
    double dt() const noexcept { return T / t_steps; }
    double slice_time(int k) const noexcept { return T * k / t_steps; }
    /// Throws DomainError for beta, T or t_steps out of range and AliasingError when
    /// u0 carries energy above half the Nyquist frequency.
    void validate() const;
};

/// Physical-representation fields at t_k = k T / K, k = 0..K.
using TimePath = std::vector<SpectralField>;
using SliceNorm = std::function<double(const SpectralField&)>;

/// sup_x |u|.
double sup_norm(const SpectralField& u);

/// sum_i d/dx_i (u^2) with the product dealiased by the 2/3 rule. Throws AliasingError
/// when u itself has energy beyond the 2/3 cutoff.
SpectralField div_square(const SpectralField& u);

/// W_{t_k}^{(beta)} u0 on every slice.
TimePath linear_evolution(const CauchyProblem& problem);

/// One application of Q^{(beta)}: W_{t_k} u0 + trapezoid in tau of W_{t_k - tau} div[u(tau)^2].
TimePath duhamel_apply(const CauchyProblem& problem, const TimePath& path);

/// (int_0^T t^{ab} ||u(t)||^a dt)^{1/a} by the trapezoid rule over the slices; the
/// weighted sup over slices when a = inf.
double weighted_time_norm(const TimePath& path, double T, double a, double b, const SliceNorm& norm);
double weighted_time_norm(const TimePath& path, double T, double a, double b, const NormSpec& spec);

struct SolverOptions {
    double tol = 1e-12;
    int max_iter = 100;
    /// Time weighting of the stopping norm.
    double a = infinity;
    double b = 0.0;
    /// Spatial norm per slice; sup_norm when empty.
    SliceNorm slice_norm;
};

struct MildSolverState {
    TimePath iterate;
    int iterations = 0;
    /// ||u^{(j+1)} - u^{(j)}|| per iteration.
    std::vector<double> diff_history;
    /// diff_{j} / diff_{j-1} from the second iteration on.
    std::vector<double> contraction_factors;
    bool converged = false;
    bool diverged = false;
    std::string message;

    /// Largest observed factor; 0 when fewer than two differences were recorded.
    double contraction_factor() const noexcept;
};

/// Picard iteration of Q^{(beta)} from the linear evolution. Stops at diff < tol, at
/// max_iter, or after three consecutive growing differences (reported as divergence).
MildSolverState fixed_point_solve(const CauchyProblem& problem, const SolverOptions& options = {});

/// Weighted norm of u - Q^{(beta)} u.
double residual_check(const CauchyProblem& problem, const TimePath& path, const SolverOptions& options = {});

/// Largest |mean u(t_k) - mean W_{t_k} u0| over the slices.
double mean_drift(const CauchyProblem& problem, const TimePath& path);

}  // namespace caloric
