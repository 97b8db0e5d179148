#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace caloric {

enum class BernsteinFamily {
    stable,             // lambda^alpha, 0 < alpha < 1
    drift,              // b * lambda
    relativistic,       // (lambda + c)^alpha - c^alpha
    log_one_plus,       // log(1 + lambda)
    generalized_power,  // lambda^beta, beta >= 1; not a Bernstein function for beta > 1
    custom,
};

/// Descriptor of a Bernstein function f(lambda) = b*lambda + int (1 - e^{-lambda r}) nu(dr).
///
/// Either the closed form or the Levy density (or both) must be present. The
/// descriptor is immutable once built; all evaluators are pure.
struct BernsteinFunction {
    std::string name;
    BernsteinFamily family = BernsteinFamily::custom;
    double drift_b = 0.0;
    std::function<double(double)> levy_density;
    std::function<double(double)> closed_form;
    std::function<double(double)> closed_form_inverse;
    std::map<std::string, double, std::less<>> params;
    /// False for the generalized exponents lambda^beta with beta > 1.
    bool is_bernstein = true;

    double param(std::string_view key) const;
};

namespace bernstein {

BernsteinFunction stable(double alpha);
/// lambda^alpha described only through its Levy density alpha/Gamma(1-alpha) r^{-alpha-1}.
BernsteinFunction stable_levy(double alpha);
BernsteinFunction drift(double b = 1.0);
BernsteinFunction relativistic(double c = 1.0, double alpha = 0.5);
BernsteinFunction log_one_plus();
BernsteinFunction generalized_power(double beta);

/// Builds a shipped family from its name ("stable", "drift", "relativistic",
/// "log1p", "power") and parameters. Throws DomainError on unknown names.
BernsteinFunction from_spec(std::string_view family, const std::map<std::string, double, std::less<>>& params);

struct Bracket {
    double lo = 1e-12;
    double hi = 1e12;
};

/// f(lambda). Uses the closed form when present, otherwise the Levy–Khintchine integral.
double eval(const BernsteinFunction& f, double lambda);

/// b*lambda + int_0^inf (1 - e^{-lambda r}) nu(dr) by adaptive quadrature,
/// regardless of whether a closed form exists.
double levy_khintchine(const BernsteinFunction& f, double lambda);

/// f^{-1}(y). Closed form inverse when present, bisection on the bracket otherwise.
double inverse(const BernsteinFunction& f, double y, Bracket bracket = {});

struct DoublingSample {
    double lambda;
    double ratio;  // f(2 lambda) / f(lambda)
};

std::vector<DoublingSample> doubling_ratio_profile(const BernsteinFunction& f,
                                                   std::span<const double> lambda_grid);

/// min over the first `tail_fraction` of the profile (small-lambda end) > 1 + margin.
bool small_lambda_doubling(std::span<const DoublingSample> profile, double margin = 0.05,
                           double tail_fraction = 0.25);

/// min over the last `tail_fraction` of the profile (large-lambda end) > 1 + margin.
bool large_lambda_doubling(std::span<const DoublingSample> profile, double margin = 0.05,
                           double tail_fraction = 0.25);

/// sup over log-spaced y in [y_lo, y_hi] of f^{-1}(2y) / f^{-1}(y). Returns
/// +inf when f^{-1}(2y) leaves the bisection bracket.
double inverse_doubling_constant(const BernsteinFunction& f, double y_lo, double y_hi,
                                 int samples = 256);

/// Doubling predicate gating the moment sandwich and the general-f smoothing
/// bound: f is Bernstein and f(2 lambda)/f(lambda) stays above 1 + margin both
/// as lambda -> 0 and as lambda -> infinity (the latter is equivalent to f^{-1}
/// being doubling at infinity).
bool satisfies_doubling(const BernsteinFunction& f, double margin = 0.05);

/// min over the grid of (-1)^{n-1} * (n-th central difference of f, step 1e-3*lambda).
double monotonicity_probe(const BernsteinFunction& f, int order, std::span<const double> lambda_grid);

std::vector<double> log_spaced(double lo, double hi, int count);

}  // namespace bernstein
}  // namespace caloric
