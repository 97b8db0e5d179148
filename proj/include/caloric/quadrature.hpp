#pragma once

#include <functional>

namespace caloric::quadrature {

struct Estimate {
    double value = 0.0;
    double error = 0.0;
};

/// Adaptive 61-point Gauss–Kronrod on [a, b]; either limit may be infinite.
/// Throws QuadratureError when the error estimate exceeds
/// max(rel_tol * |value|, abs_tol).
Estimate gauss_kronrod(const std::function<double(double)>& f, double a, double b,
                       double rel_tol = 1e-12, double abs_tol = 0.0);

/// Tanh–sinh on a finite [a, b]; used where the integrand has an integrable
/// endpoint singularity.
Estimate tanh_sinh(const std::function<double(double)>& f, double a, double b,
                   double rel_tol = 1e-12, double abs_tol = 0.0);

}  // namespace caloric::quadrature
