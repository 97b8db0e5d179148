#pragma once

#include "caloric/bernstein.hpp"
#include "caloric/spectral_grid.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace caloric {

/// Seeded draws of the alpha-stable subordinator at time t.
struct StableSampleBatch {
    double alpha = 0.5;
    double time_t = 1.0;
    std::uint64_t seed = 0;
    std::vector<double> draws;
};

namespace subordinator {

/// Draw `index` of S_1^{(alpha)} for `seed`: a pure function of (alpha, seed, index).
double stable_draw(double alpha, std::uint64_t seed, std::uint64_t index);

/// S_t = t^{1/alpha} S_1 via Kanter's uniform-angle/exponential representation.
StableSampleBatch sample_stable(double alpha, double t, std::size_t count, std::uint64_t seed);

/// E[(S_t^{(alpha)})^kappa] = Gamma(1 - kappa/alpha) / Gamma(1 - kappa) t^{kappa/alpha}, kappa < alpha.
double moment_closed_form(double alpha, double kappa, double t);

/// (1/Gamma(r)) int_0^inf exp(-t x^alpha) x^{r-1} dx by quadrature after y = t x^alpha;
/// independent oracle for moment_closed_form(alpha, -r, t).
double moment_quadrature(double alpha, double r, double t);

/// (1/Gamma(r)) int_0^inf exp(-t f(x)) x^{r-1} dx = E[(S_t^f)^{-r}] for a general Bernstein f.
/// Throws QuadratureError when the integral does not converge (the moment is infinite).
double negative_moment(const BernsteinFunction& f, double r, double t);

struct SandwichRecord {
    double t;
    double lower;
    double estimate;
    double upper;

    bool holds() const noexcept { return lower <= estimate && estimate <= upper; }
};

struct SandwichReport {
    double r = 0.0;
    /// Measured sup of f^{-1}(2y)/f^{-1}(y) on [1, 2^12 / t_min].
    double doubling_constant = 0.0;
    /// C = 1 + sum_{n >= 0} e^{-2^n} c^{(n+1) r}.
    double upper_constant = 0.0;
    std::vector<SandwichRecord> records;

    bool holds() const noexcept;
};

/// Lower/upper bounds of the negative moments in terms of [f^{-1}(1/t)]^r.
/// Throws UnsupportedFunction unless bernstein::satisfies_doubling(f), and
/// DomainError unless every t lies in (0, 1].
SandwichReport moment_sandwich_check(const BernsteinFunction& f, double r, std::span<const double> t_grid);

struct McEstimate {
    double mean = 0.0;
    double standard_error = 0.0;
};

McEstimate laplace_transform_estimate(std::span<const double> draws, double lambda);
McEstimate negative_moment_estimate(std::span<const double> draws, double r);

struct McSubordination {
    SpectralField field;
    /// Standard error of the Monte Carlo mean in the grid L2 norm.
    double l2_standard_error = 0.0;
};

/// (1/count) sum_i W_{S_i} u with S_i drawn by sample_stable; f must be the stable family.
McSubordination mc_subordinate(const BernsteinFunction& f, double t, const SpectralField& u, std::size_t count,
                               std::uint64_t seed);

/// Subordination average over caller-supplied subordinator values.
McSubordination mc_subordinate_with_draws(const SpectralField& u, std::span<const double> draws);

/// Two-sample Kolmogorov–Smirnov statistic sup |F_a - F_b|.
double ks_statistic(std::span<const double> a, std::span<const double> b);

/// Asymptotic two-sample KS critical value c(level) sqrt((n + m)/(n m)) for level in {0.1, 0.05, 0.01}.
double ks_critical_value(std::size_t n, std::size_t m, double level);

}  // namespace subordinator
}  // namespace caloric
