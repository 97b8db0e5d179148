#include "caloric/bernstein.hpp"

#include "caloric/errors.hpp"
#include "caloric/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace caloric {

double BernsteinFunction::param(std::string_view key) const {
    auto it = params.find(key);
    if (it == params.end()) {
        throw DomainError("Bernstein function '" + name + "' has no parameter '" + std::string(key) + "'");
    }
    return it->second;
}

namespace bernstein {

namespace {

/// Up to 10 significant digits, no trailing zeros.
std::string short_number(double v) {
    std::ostringstream out;
    out.precision(10);
    out << v;
    return out.str();
}

void require_open_unit(double alpha, const char* what) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw DomainError(std::string(what) + " requires 0 < alpha < 1, got " + std::to_string(alpha));
    }
}

std::function<double(double)> stable_density(double alpha) {
    const double scale = alpha / std::tgamma(1.0 - alpha);
    return [scale, alpha](double r) { return scale * std::pow(r, -alpha - 1.0); };
}

}  // namespace

BernsteinFunction stable(double alpha) {
    require_open_unit(alpha, "stable family");
    BernsteinFunction f;
    f.name = "stable(alpha=" + short_number(alpha) + ")";
    f.family = BernsteinFamily::stable;
    f.levy_density = stable_density(alpha);
    f.closed_form = [alpha](double lambda) { return std::pow(lambda, alpha); };
    f.closed_form_inverse = [alpha](double y) { return std::pow(y, 1.0 / alpha); };
    f.params = {{"alpha", alpha}};
    return f;
}

BernsteinFunction stable_levy(double alpha) {
    require_open_unit(alpha, "stable family");
    BernsteinFunction f;
    f.name = "stable_levy(alpha=" + short_number(alpha) + ")";
    f.family = BernsteinFamily::custom;
    f.levy_density = stable_density(alpha);
    f.params = {{"alpha", alpha}};
    return f;
}

BernsteinFunction drift(double b) {
    if (!(b > 0.0)) {
        throw DomainError("drift coefficient must be positive");
    }
    BernsteinFunction f;
    f.name = "drift(b=" + short_number(b) + ")";
    f.family = BernsteinFamily::drift;
    f.drift_b = b;
    f.closed_form = [b](double lambda) { return b * lambda; };
    f.closed_form_inverse = [b](double y) { return y / b; };
    f.params = {{"b", b}};
    return f;
}

BernsteinFunction relativistic(double c, double alpha) {
    require_open_unit(alpha, "relativistic family");
    if (!(c > 0.0)) {
        throw DomainError("relativistic family requires c > 0");
    }
    BernsteinFunction f;
    f.name = "relativistic(c=" + short_number(c) + ",alpha=" + short_number(alpha) + ")";
    f.family = BernsteinFamily::relativistic;
    const double c_alpha = std::pow(c, alpha);
    const double scale = alpha / std::tgamma(1.0 - alpha);
    // Tempered stable measure: alpha/Gamma(1-alpha) e^{-c r} r^{-alpha-1}.
    f.levy_density = [scale, alpha, c](double r) { return scale * std::exp(-c * r) * std::pow(r, -alpha - 1.0); };
    f.closed_form = [c, alpha, c_alpha](double lambda) {
        // (lambda + c)^alpha - c^alpha without cancellation for small lambda.
        return c_alpha * std::expm1(alpha * std::log1p(lambda / c));
    };
    f.closed_form_inverse = [c, alpha, c_alpha](double y) {
        return c * std::expm1(std::log1p(y / c_alpha) / alpha);
    };
    f.params = {{"c", c}, {"alpha", alpha}};
    return f;
}

BernsteinFunction log_one_plus() {
    BernsteinFunction f;
    f.name = "log1p";
    f.family = BernsteinFamily::log_one_plus;
    // Gamma subordinator.
    f.levy_density = [](double r) { return std::exp(-r) / r; };
    f.closed_form = [](double lambda) { return std::log1p(lambda); };
    f.closed_form_inverse = [](double y) { return std::expm1(y); };
    return f;
}

BernsteinFunction generalized_power(double beta) {
    if (!(beta > 0.0)) {
        throw DomainError("generalized power requires beta > 0");
    }
    BernsteinFunction f;
    f.name = "power(beta=" + short_number(beta) + ")";
    f.family = BernsteinFamily::generalized_power;
    f.closed_form = [beta](double lambda) { return std::pow(lambda, beta); };
    f.closed_form_inverse = [beta](double y) { return std::pow(y, 1.0 / beta); };
    f.params = {{"beta", beta}};
    f.is_bernstein = beta <= 1.0;
    if (f.is_bernstein && beta < 1.0) {
        f.levy_density = stable_density(beta);
    } else if (beta == 1.0) {
        f.drift_b = 1.0;
    }
    return f;
}

BernsteinFunction from_spec(std::string_view family, const std::map<std::string, double, std::less<>>& params) {
    auto get = [&](std::string_view key, double fallback) {
        auto it = params.find(key);
        return it == params.end() ? fallback : it->second;
    };
    auto need = [&](std::string_view key) {
        auto it = params.find(key);
        if (it == params.end()) {
            throw DomainError("family '" + std::string(family) + "' requires parameter '" + std::string(key) + "'");
        }
        return it->second;
    };
    if (family == "stable") return stable(need("alpha"));
    if (family == "stable_levy") return stable_levy(need("alpha"));
    if (family == "drift" || family == "gauss_weierstrass") return drift(get("b", 1.0));
    if (family == "relativistic") return relativistic(get("c", 1.0), get("alpha", 0.5));
    if (family == "log1p") return log_one_plus();
    if (family == "power") return generalized_power(need("beta"));
    throw DomainError("unknown Bernstein family '" + std::string(family) + "'");
}

double levy_khintchine(const BernsteinFunction& f, double lambda) {
    if (!(lambda > 0.0)) {
        throw DomainError("Bernstein functions are evaluated at lambda > 0");
    }
    double value = f.drift_b * lambda;
    if (!f.levy_density) {
        return value;
    }
    const auto& nu = f.levy_density;
    auto integrand = [&](double r) { return -std::expm1(-lambda * r) * nu(r); };
    constexpr double rel = 1e-10;
    constexpr double inf = std::numeric_limits<double>::infinity();
    const double knee = 1.0 / lambda;
    const double far = 64.0 / lambda;
    // All three pieces use r = knee e^{s}-type variables, so the work does not depend on the
    // scale of lambda. At the ends the power-type behaviour (r nu(r) ~ r^{-alpha} near 0,
    // nu ~ r^{-1-alpha} at infinity) becomes exponential decay in s. Points where nu
    // over/underflows carry no mass.
    auto head = [&](double s) {
        const double r = knee * std::exp(-s);
        const double v = integrand(r) * r;
        return std::isfinite(v) ? v : 0.0;
    };
    auto tail = [&](double s) {
        const double r = far * std::exp(s);
        const double v = integrand(r) * r;
        return std::isfinite(v) ? v : 0.0;
    };
    auto body = [&](double s) {
        const double r = knee * std::exp(s);
        return integrand(r) * r;
    };
    const double middle = quadrature::gauss_kronrod(body, 0.0, std::log(far / knee), rel, 1e-300).value;
    const double scale = std::abs(middle) + std::abs(value);
    value += middle;
    value += quadrature::gauss_kronrod(head, 0.0, inf, rel, 1e-14 * scale).value;
    value += quadrature::gauss_kronrod(tail, 0.0, inf, rel, 1e-14 * scale).value;
    return value;
}

double eval(const BernsteinFunction& f, double lambda) {
    if (!(lambda > 0.0)) {
        throw DomainError("Bernstein functions are evaluated at lambda > 0");
    }
    if (f.closed_form) {
        return f.closed_form(lambda);
    }
    if (!f.levy_density && f.drift_b == 0.0) {
        throw DomainError("Bernstein function '" + f.name + "' has neither closed form nor Levy density");
    }
    return levy_khintchine(f, lambda);
}

double inverse(const BernsteinFunction& f, double y, Bracket bracket) {
    if (!(y > 0.0)) {
        throw DomainError("inverse requires y > 0");
    }
    if (f.closed_form_inverse) {
        const double lambda = f.closed_form_inverse(y);
        if (!(lambda >= bracket.lo && lambda <= bracket.hi)) {
            throw BracketError("f^{-1}(" + std::to_string(y) + ") lies outside the bracket");
        }
        return lambda;
    }
    double lo = bracket.lo;
    double hi = bracket.hi;
    const double f_lo = eval(f, lo);
    const double f_hi = eval(f, hi);
    if (y < f_lo || y > f_hi) {
        throw BracketError("y=" + std::to_string(y) + " outside [f(lo), f(hi)] = [" + std::to_string(f_lo) + ", " +
                           std::to_string(f_hi) + "]");
    }
    const double tol = 1e-12 * std::max(1.0, y);
    double mid = std::sqrt(lo * hi);
    for (int iter = 0; iter < 400; ++iter) {
        // Geometric bisection while the bracket spans decades, arithmetic after.
        mid = hi / lo > 4.0 ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        const double value = eval(f, mid);
        if (std::abs(value - y) <= tol) {
            return mid;
        }
        (value < y ? lo : hi) = mid;
    }
    return mid;
}

std::vector<DoublingSample> doubling_ratio_profile(const BernsteinFunction& f, std::span<const double> lambda_grid) {
    std::vector<DoublingSample> out;
    out.reserve(lambda_grid.size());
    double previous = 0.0;
    for (double lambda : lambda_grid) {
        if (!(lambda > 0.0) || lambda <= previous) {
            throw DomainError("doubling profile needs a strictly increasing positive grid");
        }
        previous = lambda;
        out.push_back({lambda, eval(f, 2.0 * lambda) / eval(f, lambda)});
    }
    return out;
}

namespace {

double tail_min(std::span<const DoublingSample> profile, double tail_fraction, bool from_front) {
    if (profile.empty()) {
        throw DomainError("empty doubling profile");
    }
    const auto n = static_cast<std::size_t>(
        std::max<double>(1.0, std::ceil(tail_fraction * static_cast<double>(profile.size()))));
    auto sub = from_front ? profile.first(std::min(n, profile.size())) : profile.last(std::min(n, profile.size()));
    double lowest = std::numeric_limits<double>::infinity();
    for (const auto& s : sub) lowest = std::min(lowest, s.ratio);
    return lowest;
}

}  // namespace

bool small_lambda_doubling(std::span<const DoublingSample> profile, double margin, double tail_fraction) {
    return tail_min(profile, tail_fraction, true) > 1.0 + margin;
}

bool large_lambda_doubling(std::span<const DoublingSample> profile, double margin, double tail_fraction) {
    return tail_min(profile, tail_fraction, false) > 1.0 + margin;
}

double inverse_doubling_constant(const BernsteinFunction& f, double y_lo, double y_hi, int samples) {
    // f^{-1} grows like y^{1/alpha} for small alpha; the default bracket is too narrow here.
    const Bracket wide{1e-150, 1e150};
    double worst = 0.0;
    for (double y : log_spaced(y_lo, y_hi, samples)) {
        try {
            worst = std::max(worst, inverse(f, 2.0 * y, wide) / inverse(f, y, wide));
        } catch (const BracketError&) {
            return std::numeric_limits<double>::infinity();
        }
        if (!std::isfinite(worst)) {
            return std::numeric_limits<double>::infinity();
        }
    }
    return worst;
}

bool satisfies_doubling(const BernsteinFunction& f, double margin) {
    if (!f.is_bernstein) {
        return false;
    }
    const auto grid = log_spaced(1e-8, 1e11, 77);
    const auto profile = doubling_ratio_profile(f, grid);
    return small_lambda_doubling(profile, margin) && large_lambda_doubling(profile, margin);
}

double monotonicity_probe(const BernsteinFunction& f, int order, std::span<const double> lambda_grid) {
    if (order < 1) {
        throw DomainError("monotonicity probe order must be >= 1");
    }
    double worst = std::numeric_limits<double>::infinity();
    const double sign = (order % 2 == 1) ? 1.0 : -1.0;
    for (double lambda : lambda_grid) {
        const double h = 1e-3 * lambda;
        // n-th central difference: sum_i (-1)^i C(n,i) f(lambda + (n/2 - i) h)
        double diff = 0.0;
        double binom = 1.0;
        for (int i = 0; i <= order; ++i) {
            const double x = lambda + (0.5 * order - i) * h;
            diff += ((i % 2 == 0) ? 1.0 : -1.0) * binom * eval(f, x);
            binom = binom * (order - i) / (i + 1);
        }
        worst = std::min(worst, sign * diff);
    }
    return worst;
}

std::vector<double> log_spaced(double lo, double hi, int count) {
    if (!(lo > 0.0 && hi > lo) || count < 2) {
        throw DomainError("log_spaced needs 0 < lo < hi and count >= 2");
    }
    std::vector<double> out(static_cast<std::size_t>(count));
    const double a = std::log(lo);
    const double step = (std::log(hi) - a) / (count - 1);
    for (int i = 0; i < count; ++i) {
        out[static_cast<std::size_t>(i)] = std::exp(a + step * i);
    }
    out.front() = lo;
    out.back() = hi;
    return out;
}

}  // namespace bernstein
}  // namespace caloric
