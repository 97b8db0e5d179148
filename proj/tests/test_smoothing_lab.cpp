#include "caloric/errors.hpp"
#include "caloric/smoothing_lab.hpp"

#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace caloric;
using std::numbers::pi;

namespace {

const TorusGrid grid1(1, 4096, 64 * pi);

double fitted_slope(const SemigroupFamily& family, double d, double xi_hi) {
    SmoothingExperiment exp{family, NormSpec{Scale::besov, 0.0, 2.0, 1.0}, d,
                            fields::mode_probes(0.5, xi_hi, 16), bernstein::log_spaced(1e-3, 1.0, 24)};
    const auto table = smoothing_ratio(exp);
    const auto fit = exponent_fit(table.t, table.max_ratio);
    CHECK(fit.points == 14);
    // The max over discrete probes is a staircase envelope, so only a loose linearity check.
    if (d > 0.0) CHECK(fit.r_squared > 0.95);
    return fit.slope;
}

}  // namespace

TEST_CASE("test field families") {
    const auto family = fields::standard_family(grid1, 3, 11);
    REQUIRE(family.size() == 7);
    CHECK(family[0].id == "gaussian_w1");
    CHECK(family[3].id == "bump_r8");
    CHECK(family[4].id == "noise_0");
    const auto again = fields::band_limited_noise(grid1, 3, 11, 14.0);
    for (std::size_t i = 0; i < again.size(); ++i) {
        CHECK(max_abs((again[i].field - family[4 + i].field).values()) == 0.0);
    }
    const auto other = fields::band_limited_noise(grid1, 1, 12, 14.0);
    CHECK(max_abs((other[0].field - again[0].field).values()) > 0.0);

    const auto probes = fields::mode_probes(1.0, 4.0, 4);
    REQUIRE(probes.size() == 9);
    for (const auto& probe : probes) {
        const auto& g = probe.field.grid();
        CHECK(g.points_per_axis() >= 128);
        CHECK(g.nyquist() >= 8.0 * g.frequency_step());
    }
}

TEST_CASE("contraction on representative cases") {
    const std::vector<double> ts{1e-6, 0.1, 1.0};
    const auto gaussians = fields::gaussians(grid1, {1.0, 3.0});
    const auto gauss = contraction_check(SemigroupFamily::gauss_weierstrass(), ts,
                                         NormSpec{Scale::besov, 0.0, 2.0, 2.0}, gaussians);
    CHECK(gauss.max_ratio <= 1.0 + 1e-8);
    const auto cauchy = contraction_check(SemigroupFamily::subordinated(bernstein::stable(0.5)), ts,
                                          NormSpec{Scale::triebel, 1.0, 2.0, 1.0}, gaussians);
    CHECK(cauchy.max_ratio <= 1.0 + 1e-8);
    // Strong continuity: the ratio tends to 1 as t -> 0.
    const std::vector<double> tiny{1e-9};
    const auto near = contraction_check(SemigroupFamily::gauss_weierstrass(), tiny,
                                        NormSpec{Scale::besov, 1.0, 1.0, 1.0}, gaussians);
    CHECK(near.max_ratio == doctest::Approx(1.0).epsilon(1e-6));

    CHECK_THROWS_AS(contraction_check(SemigroupFamily::generalized_power(2.0), ts,
                                      NormSpec{Scale::besov, 0.0, 2.0, 2.0}, gaussians),
                    UnsupportedFunction);
}

TEST_CASE("contraction suite, property sweep on a small grid") {
    const auto suite = contraction_suite();
    CHECK(suite.size() == 63);
    const TorusGrid g(1, 1024, 16 * pi);
    const auto family = fields::standard_family(g, 2, 5);
    const std::vector<double> ts{0.05, 1.0};
    for (const auto& semigroup : {SemigroupFamily::gauss_weierstrass(),
                                  SemigroupFamily::subordinated(bernstein::stable(0.5)),
                                  SemigroupFamily::subordinated(bernstein::relativistic())}) {
        for (const auto& spec : suite) {
            CAPTURE(semigroup.label());
            CAPTURE(spec.label());
            CHECK(contraction_check(semigroup, ts, spec, family).max_ratio <= 1.0 + 1e-6);
        }
    }
}

TEST_CASE("smoothing ratios are bounded by their expected rates") {
    const auto ts = bernstein::log_spaced(1e-2, 1.0, 9);
    const auto fields = fields::standard_family(grid1, 2, 3);
    SUBCASE("d = 0 stays bounded") {
        SmoothingExperiment exp{SemigroupFamily::gauss_weierstrass(), NormSpec{Scale::besov, 0.0, 2.0, 2.0}, 0.0,
                                fields, ts};
        const auto table = smoothing_ratio(exp);
        CHECK(*std::max_element(table.max_ratio.begin(), table.max_ratio.end()) <= 1.0 + 1e-8);
    }
    SUBCASE("heat, d = 2: R(t) t is bounded") {
        SmoothingExperiment exp{SemigroupFamily::gauss_weierstrass(), NormSpec{Scale::besov, 0.0, 2.0, 2.0}, 2.0,
                                fields, ts};
        const auto table = smoothing_ratio(exp);
        for (std::size_t k = 0; k < ts.size(); ++k) CHECK(table.max_ratio[k] * ts[k] <= 10.0);
    }
    SUBCASE("beta = 2, d = 2: R(t) t^{1/2} is bounded") {
        SmoothingExperiment exp{SemigroupFamily::generalized_power(2.0), NormSpec{Scale::besov, 0.0, 2.0, 2.0}, 2.0,
                                fields, ts};
        const auto table = smoothing_ratio(exp);
        for (std::size_t k = 0; k < ts.size(); ++k) CHECK(table.max_ratio[k] * std::sqrt(ts[k]) <= 10.0);
    }
    CHECK_THROWS_AS((SmoothingExperiment{SemigroupFamily::gauss_weierstrass(), {}, 1.0, fields, {2.0}}.validate()),
                    DomainError);
    CHECK_THROWS_AS((SmoothingExperiment{SemigroupFamily::gauss_weierstrass(), {}, -1.0, fields, {0.5}}.validate()),
                    DomainError);
}

TEST_CASE("exponent fit on synthetic data") {
    const auto t = bernstein::log_spaced(1e-3, 1.0, 24);
    std::vector<double> power(t.size());
    std::vector<double> flat(t.size(), 2.5);
    for (std::size_t i = 0; i < t.size(); ++i) power[i] = 3.0 / t[i];
    const auto fit = exponent_fit(t, power);
    CHECK(fit.slope == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(std::exp(fit.intercept) == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(fit.r_squared == doctest::Approx(1.0));
    const auto constant = exponent_fit(t, flat);
    CHECK(constant.degenerate);
    CHECK(constant.slope == 0.0);
    const std::vector<double> narrow_t{0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    CHECK_THROWS_AS(exponent_fit(narrow_t, std::vector<double>(6, 1.0)), DomainError);
    CHECK_THROWS_AS(exponent_fit({1e-3, 1.0}, {1.0, 1.0}), DomainError);
}

TEST_CASE("fitted smoothing exponents") {
    CHECK(fitted_slope(SemigroupFamily::subordinated(bernstein::stable(0.5)), 1.0, 8000.0) ==
          doctest::Approx(-1.0).epsilon(0.05));
    CHECK(fitted_slope(SemigroupFamily::generalized_power(2.0), 2.0, 64.0) == doctest::Approx(-0.5).epsilon(0.05));
    CHECK(std::abs(fitted_slope(SemigroupFamily::gauss_weierstrass(), 0.0, 64.0)) <= 0.05);
}

TEST_CASE("Gamma ratio") {
    CHECK(gamma_ratio(0.5, 2.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(gamma_ratio(0.5, 1.0) == doctest::Approx(1.1283791670955126).epsilon(1e-14));
    CHECK(gamma_ratio(1.0, 3.0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("bound profiles") {
    const auto t = bernstein::log_spaced(1e-3, 1.0, 12);
    std::vector<double> ratios(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) ratios[i] = 0.7 * std::pow(t[i], -1.0) + 0.1;

    const auto power = constant_bound_check(0.5, 1.0, t, ratios);
    CHECK(power.margins_nonnegative());
    CHECK(power.stable());
    CHECK(power.gamma_ratio == doctest::Approx(1.1283791670955126));

    // f = l^alpha: [f^{-1}(1/t)]^{-d/2} = t^{d/(2 alpha)}.
    const auto general = general_f_smoothing_check(bernstein::stable(0.5), 1.0, t, ratios);
    CHECK(general.margins_nonnegative());
    for (std::size_t i = 0; i < t.size(); ++i) {
        CHECK(general.local_constant[i] == doctest::Approx(ratios[i] * t[i]).epsilon(1e-10));
    }
    // f = l: the classical t^{d/2}.
    const auto heat = general_f_smoothing_check(bernstein::drift(), 2.0, t, ratios);
    CHECK(heat.local_constant.front() == doctest::Approx(ratios.front() * t.front()).epsilon(1e-10));

    CHECK_THROWS_AS(general_f_smoothing_check(bernstein::log_one_plus(), 1.0, t, ratios), UnsupportedFunction);
}

TEST_CASE("relativistic general-f profile is t-stable") {
    const auto t = bernstein::log_spaced(1e-3, 1.0, 24);
    const auto family = SemigroupFamily::subordinated(bernstein::relativistic());
    SmoothingExperiment exp{family, NormSpec{Scale::besov, 0.0, 2.0, 1.0}, 1.0, fields::mode_probes(0.5, 8000.0, 8), t};
    const auto table = smoothing_ratio(exp);
    const auto profile = general_f_smoothing_check(bernstein::relativistic(), 1.0, table.t, table.max_ratio);
    CHECK(profile.margins_nonnegative());
    CHECK(profile.stable(10.0));
}
