#include "caloric/smoothing_lab.hpp"

#include "caloric/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace caloric {

namespace fields {

std::vector<TestField> gaussians(const TorusGrid& grid, const std::vector<double>& widths) {
    std::vector<TestField> out;
    for (double w : widths) {
        if (!(w > 0.0)) throw DomainError("Gaussian width must be positive");
        std::ostringstream id;
        id << "gaussian_w" << w;
        out.push_back({id.str(), SpectralField::sample(grid, [w](double x, double y) {
                           return std::exp(-(x * x + y * y) / (w * w));
                       })});
    }
    return out;
}

TestField compact_bump(const TorusGrid& grid, double radius) {
    if (!(radius > 0.0 && radius < grid.half_length())) {
        throw DomainError("bump radius must lie in (0, L)");
    }
    std::ostringstream id;
    id << "bump_r" << radius;
    return {id.str(), SpectralField::sample(grid, [radius](double x, double y) {
                const double r2 = (x * x + y * y) / (radius * radius);
                return r2 < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - r2)) : 0.0;
            })};
}

std::vector<TestField> band_limited_noise(const TorusGrid& grid, std::size_t count, std::uint64_t seed, double band) {
    if (!(band > 0.0)) throw DomainError("noise band must be positive");
    std::vector<TestField> out;
    for (std::size_t n = 0; n < count; ++n) {
        std::seed_seq sequence{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                               static_cast<std::uint32_t>(n)};
        std::mt19937_64 engine(sequence);
        // Raw engine bits keep the draws identical across standard libraries.
        auto uniform = [&engine] { return static_cast<double>(engine() >> 11) * 0x1.0p-53 * 2.0 - 1.0; };
        auto spectrum = SpectralField::zeros(grid, Representation::frequency);
        for (std::size_t i = 0; i < spectrum.size(); ++i) {
            const double re = uniform();
            const double im = uniform();
            if (grid.frequency_abs(i) <= band) spectrum[i] = Complex(re, im);
        }
        auto field = transform_inverse(spectrum);
        for (auto& v : field.values()) v = Complex(v.real(), 0.0);
        out.push_back({"noise_" + std::to_string(n), std::move(field)});
    }
    return out;
}

std::vector<TestField> mode_probes(double xi_lo, double xi_hi, int per_octave) {
    if (!(xi_lo > 0.0 && xi_hi >= xi_lo) || per_octave < 1) {
        throw DomainError("mode probes need 0 < xi_lo <= xi_hi and per_octave >= 1");
    }
    constexpr long lattice_index = 8;
    std::vector<TestField> out;
    const double step = std::log(2.0) / per_octave;
    const auto count = static_cast<std::size_t>(std::floor(std::log(xi_hi / xi_lo) / step)) + 1;
    for (std::size_t m = 0; m < count; ++m) {
        const double xi0 = xi_lo * std::exp(step * static_cast<double>(m));
        // Nyquist xi0 N / 16 stays >= 8 so the grid carries at least blocks 0..3.
        std::size_t n = 128;
        while (xi0 * static_cast<double>(n) / 16.0 < 8.0) n *= 2;
        const TorusGrid grid(1, n, lattice_index * std::numbers::pi / xi0);
        auto spectrum = SpectralField::zeros(grid, Representation::frequency);
        const double amplitude = 0.5 * std::sqrt(static_cast<double>(n));
        spectrum[lattice_index] = amplitude;
        spectrum[n - lattice_index] = amplitude;
        std::ostringstream id;
        id.precision(6);
        id << "mode_" << xi0;
        out.push_back({id.str(), std::move(spectrum)});
    }
    return out;
}

std::vector<TestField> standard_family(const TorusGrid& grid, std::size_t noise_count, std::uint64_t seed) {
    auto out = gaussians(grid, {1.0, 2.0, 4.0});
    out.push_back(compact_bump(grid, std::min(8.0, 0.5 * grid.half_length())));
    const double band = 0.875 * std::ldexp(1.0, grid.k_max() - 1);
    auto noise = band_limited_noise(grid, noise_count, seed, band);
    std::move(noise.begin(), noise.end(), std::back_inserter(out));
    return out;
}

}  // namespace fields

void SmoothingExperiment::validate() const {
    norm_in.validate();
    if (!(gain_d >= 0.0) || !std::isfinite(gain_d)) throw DomainError("smoothness gain d must be >= 0");
    if (t_grid.empty()) throw DomainError("smoothing experiment needs a nonempty t-grid");
    for (double t : t_grid) {
        if (!(t > 0.0 && t <= 1.0)) throw DomainError("smoothing estimates are stated for 0 < t <= 1");
    }
    if (test_fields.empty()) throw DomainError("smoothing experiment needs at least one test field");
}

namespace {

/// True when the norm is determined by the block L2 norms alone.
bool block_l2_determined(const NormSpec& spec) {
    return spec.p == 2.0 && (spec.scale == Scale::besov || spec.q == 2.0);
}

double weighted_sequence(std::vector<double> a, double s, double q) {
    for (std::size_t k = 0; k < a.size(); ++k) a[k] *= std::pow(2.0, static_cast<double>(k) * s);
    return sequence_norm(a, q);
}

/// ratio(t) = ||W_t u | out|| / ||u | in|| for one field over the t-grid.
std::vector<double> field_ratios(const SemigroupFamily& family, const NormSpec& in, const NormSpec& out,
                                 const TestField& field, const std::vector<double>& t_grid) {
    const DyadicPartition partition(field.field.grid());
    std::vector<double> ratios;
    ratios.reserve(t_grid.size());
    if (block_l2_determined(in) && block_l2_determined(out)) {
        const auto spectrum = to_frequency(field.field);
        check_resolution(spectrum, partition);
        const auto entries = nonzero_entries(spectrum);
        const double dv = spectrum.grid().cell_volume();
        const auto base = block_l2_norms(entries, partition, dv);
        const double denominator = weighted_sequence(base, in.s, in.q);
        if (!(denominator > 0.0)) throw DomainError("test field '" + field.id + "' has zero norm");
        auto evolved = entries;
        for (double t : t_grid) {
            const SemigroupSpec spec{family, t};
            for (std::size_t i = 0; i < entries.size(); ++i) {
                evolved[i].value = entries[i].value * spec.multiplier(entries[i].xi_abs);
            }
            ratios.push_back(weighted_sequence(block_l2_norms(evolved, partition, dv), out.s, out.q) / denominator);
        }
        return ratios;
    }
    const double denominator = norm(field.field, partition, in);
    if (!(denominator > 0.0)) throw DomainError("test field '" + field.id + "' has zero norm");
    const auto physical = to_physical(field.field);
    for (double t : t_grid) {
        ratios.push_back(norm(apply(SemigroupSpec{family, t}, physical), partition, out) / denominator);
    }
    return ratios;
}

}  // namespace

RatioTable smoothing_ratio(const SmoothingExperiment& exp) {
    exp.validate();
    NormSpec out = exp.norm_in;
    out.s += exp.gain_d;
    RatioTable table;
    table.t = exp.t_grid;
    table.max_ratio.assign(exp.t_grid.size(), 0.0);
    for (const auto& field : exp.test_fields) {
        const auto ratios = field_ratios(exp.semigroup, exp.norm_in, out, field, exp.t_grid);
        for (std::size_t i = 0; i < ratios.size(); ++i) {
            table.rows.push_back({exp.t_grid[i], field.id, ratios[i]});
            table.max_ratio[i] = std::max(table.max_ratio[i], ratios[i]);
        }
    }
    return table;
}

ContractionReport contraction_check(const SemigroupFamily& family, const std::vector<double>& t_grid,
                                    const NormSpec& norm_spec, const std::vector<TestField>& test_fields) {
    norm_spec.validate();
    if (!family.is_markovian()) {
        throw UnsupportedFunction("contraction holds for Bernstein-kind semigroups only, got " + family.label());
    }
    if (norm_spec.p < 1.0 || (norm_spec.scale == Scale::triebel && norm_spec.q < 1.0)) {
        throw DomainError("contraction is stated for p >= 1 (and q >= 1 on the F-scale): " + norm_spec.label());
    }
    for (double t : t_grid) {
        if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("contraction times must be positive");
    }
    ContractionReport report;
    for (const auto& field : test_fields) {
        const auto ratios = field_ratios(family, norm_spec, norm_spec, field, t_grid);
        for (std::size_t i = 0; i < ratios.size(); ++i) {
            if (ratios[i] > report.max_ratio) {
                report.max_ratio = ratios[i];
                report.worst_field = field.id;
                report.worst_t = t_grid[i];
            }
        }
    }
    return report;
}

std::vector<NormSpec> contraction_suite() {
    std::vector<NormSpec> suite;
    const double s_values[] = {-1.0, 0.0, 1.5};
    for (double s : s_values) {
        for (double p : {1.0, 2.0, infinity}) {
            for (double q : {0.5, 1.0, 2.0, infinity}) suite.push_back({Scale::besov, s, p, q});
        }
    }
    for (double s : s_values) {
        for (double p : {1.0, 2.0, infinity}) {
            for (double q : {1.0, 2.0, infinity}) suite.push_back({Scale::triebel, s, p, q});
        }
    }
    return suite;
}

ExponentFit exponent_fit(const std::vector<double>& t, const std::vector<double>& ratios, double window) {
    if (t.size() != ratios.size()) throw DomainError("exponent_fit needs matching t and ratio columns");
    if (t.size() < 6) throw DomainError("exponent_fit needs at least 6 t-points");
    if (!(window > 0.0 && window <= 1.0)) throw DomainError("fit window must lie in (0, 1]");
    std::vector<std::pair<double, double>> points;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(t[i] > 0.0) || !(ratios[i] > 0.0)) throw DomainError("exponent_fit needs positive t and ratios");
        points.emplace_back(t[i], ratios[i]);
    }
    std::sort(points.begin(), points.end());
    if (points.back().first / points.front().first < 100.0 * (1.0 - 1e-12)) {
        throw DomainError("exponent_fit needs a t-grid spanning at least two decades");
    }
    const auto used = std::max<std::size_t>(2, static_cast<std::size_t>(window * static_cast<double>(points.size())));
    points.resize(std::min(used, points.size()));

    ExponentFit fit;
    fit.points = points.size();
    const auto [lo, hi] = std::minmax_element(points.begin(), points.end(),
                                              [](const auto& a, const auto& b) { return a.second < b.second; });
    if (hi->second - lo->second <= 1e-12 * hi->second) {
        fit.degenerate = true;
        fit.intercept = std::log(hi->second);
        return fit;
    }
    double mx = 0.0;
    double my = 0.0;
    for (const auto& [x, y] : points) {
        mx += std::log(x);
        my += std::log(y);
    }
    const double n = static_cast<double>(points.size());
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (const auto& [x, y] : points) {
        const double dx = std::log(x) - mx;
        const double dy = std::log(y) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = (sxy * sxy) / (sxx * syy);
    return fit;
}

bool BoundProfile::margins_nonnegative() const noexcept {
    for (std::size_t i = 0; i < margin.size(); ++i) {
        if (margin[i] < -1e-12 * bound[i]) return false;
    }
    return !margin.empty();
}

double gamma_ratio(double exponent, double d) {
    if (!(exponent > 0.0) || !(d >= 0.0)) throw DomainError("gamma_ratio needs exponent > 0 and d >= 0");
    return std::tgamma(1.0 + d / (2.0 * exponent)) / std::tgamma(1.0 + d / 2.0);
}

namespace {

/// Calibrates C = max_t R(t) / shape(t) and fills bound = C shape, margin = bound - R.
BoundProfile calibrate(const std::vector<double>& t, const std::vector<double>& ratios,
                       const std::vector<double>& shape) {
    if (t.empty() || t.size() != ratios.size()) throw DomainError("bound check needs matching nonempty columns");
    BoundProfile profile;
    profile.t = t;
    for (std::size_t i = 0; i < t.size(); ++i) profile.local_constant.push_back(ratios[i] / shape[i]);
    const auto [lo, hi] = std::minmax_element(profile.local_constant.begin(), profile.local_constant.end());
    profile.constant = *hi;
    profile.stability = *lo > 0.0 ? *hi / *lo : std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < t.size(); ++i) {
        profile.bound.push_back(profile.constant * shape[i]);
        profile.margin.push_back(profile.bound.back() - ratios[i]);
    }
    return profile;
}

}  // namespace

BoundProfile constant_bound_check(double exponent, double d, const std::vector<double>& t,
                                  const std::vector<double>& ratios) {
    const double g = gamma_ratio(exponent, d);
    std::vector<double> shape;
    for (double ti : t) {
        if (!(ti > 0.0)) throw DomainError("bound check needs t > 0");
        shape.push_back(std::pow(ti, -d / (2.0 * exponent)) * g + 1.0);
    }
    auto profile = calibrate(t, ratios, shape);
    profile.gamma_ratio = g;
    return profile;
}

BoundProfile general_f_smoothing_check(const BernsteinFunction& f, double d, const std::vector<double>& t,
                                       const std::vector<double>& ratios) {
    if (!bernstein::satisfies_doubling(f)) {
        throw UnsupportedFunction("'" + f.name + "' fails the doubling predicate");
    }
    if (!(d >= 0.0)) throw DomainError("smoothness gain must be >= 0");
    std::vector<double> shape;
    for (double ti : t) {
        if (!(ti > 0.0)) throw DomainError("bound check needs t > 0");
        // R(t) <= C' [f^{-1}(1/t)]^{d/2}.
        shape.push_back(std::pow(bernstein::inverse(f, 1.0 / ti), 0.5 * d));
    }
    return calibrate(t, ratios, shape);
}

}  // namespace caloric
