#include "caloric/errors.hpp"
#include "caloric/pde_solver.hpp"

#include "doctest.h"

#include <cmath>
#include <numbers>

using namespace caloric;
using std::numbers::pi;

namespace {

const TorusGrid circle(1, 64, pi);  // integer lattice

SpectralField wave(double amplitude, double k, double phase = 0.0) {
    return SpectralField::sample(circle, [=](double x, double) { return amplitude * std::sin(k * x + phase); });
}

CauchyProblem problem(double beta, SpectralField u0, int steps = 64) {
    return CauchyProblem{beta, std::move(u0), 1.0, steps};
}

double sup_diff(const SpectralField& a, const SpectralField& b) { return sup_norm(a - b); }

}  // namespace

TEST_CASE("nonlinearity") {
    CHECK(sup_norm(div_square(SpectralField::sample(circle, [](double, double) { return 3.0; }))) <= 1e-13);
    // (sin^2 x)' = sin 2x.
    CHECK(sup_diff(div_square(wave(1.0, 1.0)), wave(1.0, 2.0)) <= 1e-13);
    const auto u = wave(0.3, 2.0) + wave(0.1, 5.0, 0.4);
    CHECK(sup_diff(div_square(2.0 * u), 4.0 * div_square(u)) <= 1e-13);
    // (u^2)' = 2 u u' for a resolved product.
    const auto product = SpectralField::sample(circle, [](double x, double) {
        const double v = 0.3 * std::sin(2.0 * x) + 0.1 * std::sin(5.0 * x + 0.4);
        const double dv = 0.6 * std::cos(2.0 * x) + 0.5 * std::cos(5.0 * x + 0.4);
        return 2.0 * v * dv;
    });
    CHECK(sup_diff(div_square(u), product) <= 1e-13);
    CHECK_THROWS_AS(div_square(wave(1.0, 30.0)), AliasingError);
}

TEST_CASE("Duhamel map pieces") {
    const double eps = 0.01;
    const auto p = problem(1.5, wave(eps, 1.0), 32);
    const auto linear = linear_evolution(p);
    REQUIRE(linear.size() == 33);
    for (int k = 0; k <= p.t_steps; ++k) {
        CHECK(sup_diff(linear[k], wave(eps * std::exp(-p.slice_time(k)), 1.0)) <= 1e-15);
    }
    // Q(0) is the linear evolution, and 0 is a fixed point for u0 = 0.
    const TimePath zero(linear.size(), SpectralField::zeros(circle));
    const auto q0 = duhamel_apply(p, zero);
    for (std::size_t k = 0; k < q0.size(); ++k) CHECK(sup_diff(q0[k], linear[k]) <= 1e-15);
    const auto trivial = problem(1.0, SpectralField::zeros(circle));
    const auto zero_solution = fixed_point_solve(trivial);
    CHECK(zero_solution.converged);
    CHECK(sup_norm(zero_solution.iterate.back()) == 0.0);

    // One Picard step from the linear path: the sin 2x coefficient is the trapezoid sum of
    // e^{-(t_k - tau) 4^beta} eps^2 e^{-2 tau}, computed here mode by mode.
    const auto q = duhamel_apply(p, linear);
    const double c = std::pow(4.0, p.beta);
    const double dt = p.dt();
    for (int k : {1, 7, 32}) {
        const double tk = p.slice_time(k);
        double sum = 0.0;
        for (int j = 0; j <= k; ++j) {
            const double tau = j * dt;
            const double f = std::exp(-(tk - tau) * c) * eps * eps * std::exp(-2.0 * tau);
            sum += (j == 0 || j == k) ? 0.5 * f : f;
        }
        const auto expected = wave(eps * std::exp(-tk), 1.0) + wave(sum * dt, 2.0);
        CAPTURE(k);
        CHECK(sup_diff(q[k], expected) <= 1e-15);
        // And the exact integral within the trapezoid error.
        const double exact = eps * eps * (std::exp(-2.0 * tk) - std::exp(-c * tk)) / (c - 2.0);
        CHECK(std::abs(sum * dt - exact) <= 1e-2 * eps * eps * dt * dt * c * c + 1e-18);
    }
}

TEST_CASE("Picard iteration converges for small data") {
    for (double beta : {1.0, 1.5, 2.0}) {
        CAPTURE(beta);
        const auto p = problem(beta, wave(0.01, 1.0) + wave(0.005, 3.0, 0.7));
        const auto state = fixed_point_solve(p);
        CHECK(state.converged);
        CHECK_FALSE(state.diverged);
        CHECK(state.iterations <= 10);
        CHECK(state.contraction_factor() < 0.5);
        CHECK(residual_check(p, state.iterate) <= 1e-10);
        CHECK(mean_drift(p, state.iterate) <= 1e-12);
        for (std::size_t j = 1; j < state.diff_history.size(); ++j) {
            CHECK(state.diff_history[j] < state.diff_history[j - 1]);
        }
    }
}

TEST_CASE("larger amplitude still contracts, just more slowly") {
    const auto small = fixed_point_solve(problem(1.0, wave(0.01, 1.0)));
    const auto large = fixed_point_solve(problem(1.0, wave(0.2, 1.0)));
    CHECK(small.converged);
    CHECK(large.converged);
    CHECK(large.contraction_factor() > small.contraction_factor());
    CHECK(large.iterations >= small.iterations);
}

TEST_CASE("second-order convergence in time") {
    std::vector<SpectralField> finals;
    for (int steps : {16, 32, 64}) {
        const auto state = fixed_point_solve(problem(1.0, wave(0.3, 1.0), steps));
        REQUIRE(state.converged);
        finals.push_back(state.iterate.back());
    }
    const double ratio = sup_diff(finals[0], finals[1]) / sup_diff(finals[1], finals[2]);
    CHECK(ratio >= 3.0);
    CHECK(ratio <= 5.0);
}

TEST_CASE("weighted time norms") {
    const auto u = SpectralField::sample(circle, [](double, double) { return -2.0; });
    const TimePath path(11, u);
    CHECK(weighted_time_norm(path, 1.0, infinity, 0.0, sup_norm) == doctest::Approx(2.0));
    CHECK(weighted_time_norm(path, 1.0, 2.0, 0.0, sup_norm) == doctest::Approx(2.0));
    // (int_0^1 t * 2 dt)^1 = 1, exact for the trapezoid rule.
    CHECK(weighted_time_norm(path, 1.0, 1.0, 1.0, sup_norm) == doctest::Approx(1.0));
    CHECK(weighted_time_norm(path, 2.0, infinity, 0.5, sup_norm) == doctest::Approx(2.0 * std::sqrt(2.0)));
    CHECK(weighted_time_norm(path, 1.0, infinity, 0.0, NormSpec{Scale::besov, 0.0, infinity, infinity}) ==
          doctest::Approx(2.0).epsilon(1e-12));
    CHECK_THROWS_AS(weighted_time_norm(path, 1.0, 0.0, 0.0, sup_norm), DomainError);
    CHECK_THROWS_AS(weighted_time_norm(path, 1.0, 1.0, -1.0, sup_norm), DomainError);
    CHECK_THROWS_AS(weighted_time_norm(TimePath(1, u), 1.0, 1.0, 0.0, sup_norm), DomainError);
}

TEST_CASE("problem validation") {
    CHECK_THROWS_AS(problem(0.0, wave(0.01, 1.0)).validate(), DomainError);
    CHECK_THROWS_AS(problem(0.5, wave(0.01, 1.0)).validate(), DomainError);
    auto experimental = problem(0.5, wave(0.01, 1.0));
    experimental.experimental = true;
    CHECK_NOTHROW(experimental.validate());
    CHECK_THROWS_AS(problem(1.0, wave(0.01, 1.0), 0).validate(), DomainError);
    auto late = problem(1.0, wave(0.01, 1.0));
    late.T = -1.0;
    CHECK_THROWS_AS(late.validate(), DomainError);
    // Lattice index 20 > 64/4.
    CHECK_THROWS_AS(problem(1.0, wave(0.01, 20.0)).validate(), AliasingError);
    CHECK_NOTHROW(problem(1.0, wave(0.01, 15.0)).validate());
}
