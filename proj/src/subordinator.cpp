#include "caloric/subordinator.hpp"

#include "caloric/errors.hpp"
#include "caloric/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

namespace caloric::subordinator {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Uniform in the open interval (0, 1).
double open_uniform(std::uint64_t bits) { return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53; }

void require_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw DomainError("stable subordinators need 0 < alpha < 1");
    }
}

}  // namespace

double stable_draw(double alpha, std::uint64_t seed, std::uint64_t index) {
    const std::uint64_t key = splitmix64(seed ^ splitmix64(index));
    const double angle = std::numbers::pi * open_uniform(splitmix64(key));
    const double expo = -std::log(open_uniform(splitmix64(key ^ 0xd1b54a32d192ed03ULL)));
    const double log_a = (alpha * std::log(std::sin(alpha * angle)) +
                          (1.0 - alpha) * std::log(std::sin((1.0 - alpha) * angle)) - std::log(std::sin(angle))) /
                         (1.0 - alpha);
    return std::exp((1.0 - alpha) / alpha * (log_a - std::log(expo)));
}

StableSampleBatch sample_stable(double alpha, double t, std::size_t count, std::uint64_t seed) {
    require_alpha(alpha);
    if (!(t > 0.0)) throw DomainError("sample_stable needs t > 0");
    if (count == 0) throw DomainError("sample_stable needs count >= 1");
    StableSampleBatch batch{alpha, t, seed, std::vector<double>(count)};
    const double scale = std::pow(t, 1.0 / alpha);
    for (std::size_t i = 0; i < count; ++i) {
        batch.draws[i] = scale * stable_draw(alpha, seed, i);
    }
    return batch;
}

double moment_closed_form(double alpha, double kappa, double t) {
    require_alpha(alpha);
    if (!(kappa < alpha)) {
        throw DomainError("stable moments exist only for kappa < alpha");
    }
    if (!(t > 0.0)) throw DomainError("moment needs t > 0");
    return std::tgamma(1.0 - kappa / alpha) / std::tgamma(1.0 - kappa) * std::pow(t, kappa / alpha);
}

double moment_quadrature(double alpha, double r, double t) {
    require_alpha(alpha);
    if (!(r > 0.0) || !(t > 0.0)) throw DomainError("moment_quadrature needs r > 0 and t > 0");
    // With y = t x^alpha: int_0^inf e^{-t x^alpha} x^{r-1} dx = t^{-r/alpha} / alpha * int_0^inf e^{-y} y^{a-1} dy.
    const double a = r / alpha;
    constexpr double rel = 1e-13;
    double head = 0.0;
    if (a < 1.0) {
        // Split off the singular part: int_0^1 y^{a-1} dy = 1/a.
        head = 1.0 / a + quadrature::tanh_sinh([a](double y) { return std::pow(y, a - 1.0) * std::expm1(-y); }, 0.0,
                                               1.0, rel, 1e-300)
                             .value;
    } else {
        head = quadrature::tanh_sinh([a](double y) { return std::pow(y, a - 1.0) * std::exp(-y); }, 0.0, 1.0, rel,
                                     1e-300)
                   .value;
    }
    const double tail =
        quadrature::gauss_kronrod([a](double y) { return std::exp((a - 1.0) * std::log(y) - y); }, 1.0,
                                  std::numeric_limits<double>::infinity(), rel, 1e-300)
            .value;
    return std::pow(t, -a) / (alpha * std::tgamma(r)) * (head + tail);
}

double negative_moment(const BernsteinFunction& f, double r, double t) {
    if (!(r > 0.0) || !(t > 0.0)) throw DomainError("negative_moment needs r > 0 and t > 0");
    auto integrand = [&](double x) { return x > 0.0 ? std::exp(-t * bernstein::eval(f, x)) * std::pow(x, r - 1.0) : 0.0; };
    constexpr double rel = 1e-12;
    double scale = 1.0;
    try {
        scale = bernstein::inverse(f, 1.0 / t);
    } catch (const BracketError&) {
        scale = 1.0;
    }
    double total = quadrature::tanh_sinh(integrand, 0.0, scale, rel, 1e-300).value;
    // Geometric pieces out to infinity; a non-decaying sequence of pieces means a divergent moment.
    double lo = scale;
    int quiet = 0;
    for (int piece = 0; piece < 4000; ++piece) {
        const double hi = 2.0 * lo;
        if (!std::isfinite(hi)) break;
        const double part = quadrature::gauss_kronrod(integrand, lo, hi, rel, 1e-300).value;
        total += part;
        lo = hi;
        quiet = (part <= 1e-16 * total) ? quiet + 1 : 0;
        if (quiet >= 8) {
            return total / std::tgamma(r);
        }
    }
    throw QuadratureError("negative moment integral does not converge (moment is infinite)", 1.0);
}

bool SandwichReport::holds() const noexcept {
    return !records.empty() && std::all_of(records.begin(), records.end(), [](const auto& rec) { return rec.holds(); });
}

SandwichReport moment_sandwich_check(const BernsteinFunction& f, double r, std::span<const double> t_grid) {
    if (!(r > 0.0)) throw DomainError("moment sandwich needs r > 0");
    if (t_grid.empty()) throw DomainError("moment sandwich needs at least one t");
    if (!bernstein::satisfies_doubling(f)) {
        throw UnsupportedFunction("'" + f.name + "' fails the doubling predicate; the moment sandwich does not apply");
    }
    double t_min = 1.0;
    for (double t : t_grid) {
        if (!(t > 0.0 && t <= 1.0)) throw DomainError("moment sandwich is stated for 0 < t <= 1");
        t_min = std::min(t_min, t);
    }
    SandwichReport report;
    report.r = r;
    report.doubling_constant = bernstein::inverse_doubling_constant(f, 1.0, std::ldexp(1.0, 12) / t_min, 512);
    if (!std::isfinite(report.doubling_constant)) {
        throw UnsupportedFunction("'" + f.name + "' has no finite doubling constant for f^{-1}");
    }
    double c_sum = 1.0;
    for (int n = 0; n < 64; ++n) {
        const double term = std::exp(-std::ldexp(1.0, n) + (n + 1) * r * std::log(report.doubling_constant));
        c_sum += term;
        if (term < 1e-300) break;
    }
    report.upper_constant = c_sum;
    const double gamma_1r = std::tgamma(1.0 + r);
    for (double t : t_grid) {
        const double scale = std::pow(bernstein::inverse(f, 1.0 / t), r);
        report.records.push_back({t, scale / (3.0 * gamma_1r), negative_moment(f, r, t), c_sum * scale / gamma_1r});
    }
    return report;
}

namespace {

McEstimate mean_and_error(std::span<const double> draws, auto&& transform) {
    if (draws.size() < 2) throw DomainError("Monte Carlo estimate needs at least two draws");
    double mean = 0.0;
    double m2 = 0.0;
    std::size_t n = 0;
    for (double s : draws) {
        const double v = transform(s);
        ++n;
        const double delta = v - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (v - mean);
    }
    const double variance = m2 / static_cast<double>(n - 1);
    return {mean, std::sqrt(variance / static_cast<double>(n))};
}

}  // namespace

McEstimate laplace_transform_estimate(std::span<const double> draws, double lambda) {
    return mean_and_error(draws, [lambda](double s) { return std::exp(-lambda * s); });
}

McEstimate negative_moment_estimate(std::span<const double> draws, double r) {
    return mean_and_error(draws, [r](double s) { return std::pow(s, -r); });
}

McSubordination mc_subordinate_with_draws(const SpectralField& u, std::span<const double> draws) {
    if (draws.empty()) throw DomainError("subordination average needs at least one draw");
    if (u.representation() != Representation::physical) {
        throw RepresentationError("subordination expects a physical field");
    }
    auto spectrum = transform_forward(u);
    const auto& grid = u.grid();
    const std::size_t n = draws.size();

    // Mean and variance of e^{-S |xi|^2} per distinct lattice radius.
    std::map<double, std::pair<double, double>> stats;
    for (std::size_t i = 0; i < spectrum.size(); ++i) {
        const double xi = grid.frequency_abs(i);
        stats.emplace(xi * xi, std::pair{0.0, 0.0});
    }
    for (auto& [xi2, moments] : stats) {
        double mean = 0.0;
        double m2 = 0.0;
        std::size_t k = 0;
        for (double s : draws) {
            const double v = std::exp(-s * xi2);
            ++k;
            const double delta = v - mean;
            mean += delta / static_cast<double>(k);
            m2 += delta * (v - mean);
        }
        moments = {mean, n > 1 ? m2 / static_cast<double>(n - 1) : 0.0};
    }
    double variance_sum = 0.0;
    for (std::size_t i = 0; i < spectrum.size(); ++i) {
        const double xi = grid.frequency_abs(i);
        const auto& [mean, variance] = stats.at(xi * xi);
        variance_sum += variance * std::norm(spectrum[i]);
        spectrum[i] *= mean;
    }
    const double se = std::sqrt(grid.cell_volume() * variance_sum / static_cast<double>(n));
    return {transform_inverse(spectrum), se};
}

McSubordination mc_subordinate(const BernsteinFunction& f, double t, const SpectralField& u, std::size_t count,
                               std::uint64_t seed) {
    if (f.family != BernsteinFamily::stable) {
        throw UnsupportedFunction("Monte Carlo subordination is available for the stable family only, got " + f.name);
    }
    if (count < 100) throw DomainError("Monte Carlo subordination needs count >= 100");
    const auto batch = sample_stable(f.param("alpha"), t, count, seed);
    return mc_subordinate_with_draws(u, batch.draws);
}

double ks_statistic(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw DomainError("KS statistic needs two non-empty samples");
    std::vector<double> x(a.begin(), a.end());
    std::vector<double> y(b.begin(), b.end());
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    const double nx = static_cast<double>(x.size());
    const double ny = static_cast<double>(y.size());
    while (i < x.size() && j < y.size()) {
        const double v = std::min(x[i], y[j]);
        while (i < x.size() && x[i] <= v) ++i;
        while (j < y.size() && y[j] <= v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
    }
    return d;
}

double ks_critical_value(std::size_t n, std::size_t m, double level) {
    double c = 0.0;
    if (level == 0.1) {
        c = 1.224;
    } else if (level == 0.05) {
        c = 1.358;
    } else if (level == 0.01) {
        c = 1.628;
    } else {
        throw DomainError("KS critical values are tabulated for levels 0.1, 0.05, 0.01");
    }
    const double nn = static_cast<double>(n);
    const double mm = static_cast<double>(m);
    return c * std::sqrt((nn + mm) / (nn * mm));
}

}  // namespace caloric::subordinator
