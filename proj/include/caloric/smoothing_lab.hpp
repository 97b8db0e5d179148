#pragma once

#include "caloric/bernstein.hpp"
#include "caloric/lp_norms.hpp"
#include "caloric/semigroup.hpp"
#include "caloric/spectral_grid.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace caloric {

struct TestField {
    std::string id;
    SpectralField field;
};

namespace fields {

/// exp(-|x|^2 / w^2) for each width w.
std::vector<TestField> gaussians(const TorusGrid& grid, const std::vector<double>& widths);
/// C^inf bump exp(1 - 1/(1 - |x/R|^2)) supported in |x| < R.
TestField compact_bump(const TorusGrid& grid, double radius);
/// Real parts of random spectra supported in |xi| <= band; field i depends only on (seed, i).
std::vector<TestField> band_limited_noise(const TorusGrid& grid, std::size_t count, std::uint64_t seed, double band);
/// Single cosine modes cos(xi0 x_1) with xi0 log-spaced in [xi_lo, xi_hi]. Each probe
/// lives on its own 1-D grid with xi0 = 8 pi / L and 128 points, so the ratio of any
/// two radial norms is evaluated exactly at xi0 whatever its size.
std::vector<TestField> mode_probes(double xi_lo, double xi_hi, int per_octave);

/// Gaussians, a compact bump and seeded noise on one grid.
std::vector<TestField> standard_family(const TorusGrid& grid, std::size_t noise_count, std::uint64_t seed);

}  // namespace fields

/// Semigroup family over a t-grid, input norm A^s_{p,q} and smoothness gain d.
struct SmoothingExperiment {
    SemigroupFamily semigroup;
    NormSpec norm_in;
    double gain_d = 0.0;
    std::vector<TestField> test_fields;
    std::vector<double> t_grid;

    /// Throws DomainError unless t_grid is nonempty in (0, 1] and gain_d >= 0.
    void validate() const;
};

struct RatioRow {
    double t;
    std::string field_id;
    double ratio;
};

struct RatioTable {
    std::vector<double> t;
    /// Max over fields at each t.
    std::vector<double> max_ratio;
    std::vector<RatioRow> rows;
};

/// R(t) = ||W_t u | A^{s+d}_{p,q}|| / ||u | A^s_{p,q}|| per field and t.
RatioTable smoothing_ratio(const SmoothingExperiment& exp);

struct ContractionReport {
    double max_ratio = 0.0;
    std::string worst_field;
    double worst_t = 0.0;
};

/// max over fields and t of ||W_t u|| / ||u|| in one norm. Throws DomainError for a zero-norm field
/// and UnsupportedFunction for a family that is not Markovian.
ContractionReport contraction_check(const SemigroupFamily& family, const std::vector<double>& t_grid,
                                    const NormSpec& norm, const std::vector<TestField>& test_fields);

/// The (scale, s, p, q) suite of the contraction property.
std::vector<NormSpec> contraction_suite();

struct ExponentFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    bool degenerate = false;
    std::size_t points = 0;
};

/// Least squares of log R against log t over the smallest `window` fraction of the t-grid.
/// Needs at least 6 points spanning two decades.
ExponentFit exponent_fit(const std::vector<double>& t, const std::vector<double>& ratios, double window = 0.6);

struct BoundProfile {
    std::vector<double> t;
    std::vector<double> bound;
    std::vector<double> margin;
    /// Per-t constant needed; the calibrated constant is their max.
    std::vector<double> local_constant;
    double constant = 0.0;
    double stability = 0.0;
    double gamma_ratio = 0.0;

    bool margins_nonnegative() const noexcept;
    bool stable(double limit = 10.0) const noexcept { return stability <= limit; }
};

/// Gamma(1 + d/(2 a)) / Gamma(1 + d/2).
double gamma_ratio(double exponent, double d);

/// R(t) <= c (t^{-d/(2a)} Gamma-ratio + 1) with c calibrated as the grid max.
BoundProfile constant_bound_check(double exponent, double d, const std::vector<double>& t,
                                  const std::vector<double>& ratios);

/// [f^{-1}(1/t)]^{-d/2} R(t) <= C'. Throws UnsupportedFunction when f fails the doubling predicate.
BoundProfile general_f_smoothing_check(const BernsteinFunction& f, double d, const std::vector<double>& t,
                                       const std::vector<double>& ratios);

}  // namespace caloric
