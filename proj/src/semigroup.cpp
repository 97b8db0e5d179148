#include "caloric/semigroup.hpp"

#include "caloric/errors.hpp"

#include <cmath>
#include <sstream>

namespace caloric {

SemigroupFamily SemigroupFamily::gauss_weierstrass() {
    SemigroupFamily family;
    family.kind = SemigroupKind::gauss_weierstrass;
    family.f = bernstein::drift(1.0);
    return family;
}

SemigroupFamily SemigroupFamily::subordinated(BernsteinFunction f) {
    if (!f.is_bernstein) {
        throw UnsupportedFunction("subordination needs a Bernstein function; use generalized_power for " + f.name);
    }
    SemigroupFamily family;
    family.kind = SemigroupKind::subordinated;
    family.f = std::move(f);
    return family;
}

SemigroupFamily SemigroupFamily::generalized_power(double beta) {
    if (!(beta > 0.0)) {
        throw DomainError("generalized power semigroup needs beta > 0");
    }
    SemigroupFamily family;
    family.kind = SemigroupKind::generalized_power;
    family.beta = beta;
    family.f = bernstein::generalized_power(beta);
    return family;
}

double SemigroupFamily::exponent(double lambda) const {
    switch (kind) {
        case SemigroupKind::gauss_weierstrass:
            return lambda;
        case SemigroupKind::subordinated:
            return lambda > 0.0 ? bernstein::eval(f, lambda) : 0.0;
        case SemigroupKind::generalized_power:
            return std::pow(lambda, beta);
    }
    return lambda;
}

bool SemigroupFamily::is_markovian() const {
    switch (kind) {
        case SemigroupKind::gauss_weierstrass:
        case SemigroupKind::subordinated:
            return true;
        case SemigroupKind::generalized_power:
            return beta <= 1.0;
    }
    return false;
}

std::string SemigroupFamily::label() const {
    std::ostringstream out;
    switch (kind) {
        case SemigroupKind::gauss_weierstrass:
            out << "gauss_weierstrass";
            break;
        case SemigroupKind::subordinated:
            out << "subordinated[" << f.name << "]";
            break;
        case SemigroupKind::generalized_power:
            out << "generalized_power[beta=" << beta << "]";
            break;
    }
    return out.str();
}

double SemigroupSpec::multiplier(double xi_abs) const {
    return std::exp(-time_t * family.exponent(xi_abs * xi_abs));
}

namespace {

void require_positive_time(double t) {
    if (!(t > 0.0) || !std::isfinite(t)) {
        throw DomainError("semigroup time must be positive and finite");
    }
}

}  // namespace

SpectralField apply_spectral(const SemigroupSpec& spec, const SpectralField& spectrum) {
    require_positive_time(spec.time_t);
    SpectralField out = spectrum;
    scale_spectrum(out, [&](double r) { return spec.multiplier(r); });
    return out;
}

SpectralField apply(const SemigroupSpec& spec, const SpectralField& u) {
    if (u.representation() != Representation::physical) {
        throw RepresentationError("semigroups are applied to physical fields");
    }
    return transform_inverse(apply_spectral(spec, transform_forward(u)));
}

double semigroup_property_check(const SemigroupFamily& family, double t, double s, const SpectralField& u) {
    const auto composed = apply(SemigroupSpec{family, t}, apply(SemigroupSpec{family, s}, u));
    const auto direct = apply(SemigroupSpec{family, t + s}, u);
    return max_abs((composed - direct).values());
}

SpectralField kernel_extract(const SemigroupSpec& spec, const TorusGrid& grid) {
    require_positive_time(spec.time_t);
    const double at_nyquist = spec.multiplier(grid.nyquist());
    if (std::abs(at_nyquist) > 1e-8) {
        std::ostringstream value;
        value << at_nyquist;
        throw AliasingError("symbol at the Nyquist frequency is " + value.str() +
                            " > 1e-8; the kernel is not resolved on this grid");
    }
    auto spectrum = SpectralField::zeros(grid, Representation::frequency);
    for (std::size_t i = 0; i < spectrum.size(); ++i) {
        const auto [a, b] = grid.axis_indices(i);
        // Phase of x_0 = -L: exp(-i pi j) per axis.
        long parity = grid.wavenumber(a);
        if (grid.dim() == 2) parity += grid.wavenumber(b);
        const double sign = (parity % 2 == 0) ? 1.0 : -1.0;
        spectrum[i] = sign * spec.multiplier(grid.frequency_abs(i));
    }
    auto kernel = transform_inverse(spectrum);
    const double scale = std::sqrt(static_cast<double>(grid.size())) / grid.volume();
    for (auto& v : kernel.values()) v = Complex(v.real() * scale, 0.0);
    return kernel;
}

SpectralField convolve_with_kernel(const SpectralField& kernel, const SpectralField& u) {
    if (!(kernel.grid() == u.grid()) || kernel.representation() != Representation::physical ||
        u.representation() != Representation::physical) {
        throw RepresentationError("convolution needs two physical fields on the same grid");
    }
    const auto& grid = u.grid();
    const std::size_t n = grid.points_per_axis();
    const std::size_t half = n / 2;
    auto out = SpectralField::zeros(grid);
    const double dv = grid.cell_volume();
    if (grid.dim() == 1) {
        for (std::size_t a = 0; a < n; ++a) {
            Complex sum = 0.0;
            for (std::size_t b = 0; b < n; ++b) sum += kernel[(a + n + half - b) % n] * u[b];
            out[a] = dv * sum;
        }
        return out;
    }
    for (std::size_t a0 = 0; a0 < n; ++a0) {
        for (std::size_t a1 = 0; a1 < n; ++a1) {
            Complex sum = 0.0;
            for (std::size_t b0 = 0; b0 < n; ++b0) {
                const std::size_t k0 = (a0 + n + half - b0) % n;
                for (std::size_t b1 = 0; b1 < n; ++b1) {
                    sum += kernel[k0 * n + (a1 + n + half - b1) % n] * u[b0 * n + b1];
                }
            }
            out[a0 * n + a1] = dv * sum;
        }
    }
    return out;
}

PositivityReport positivity_probe(const SemigroupSpec& spec, const TorusGrid& grid) {
    const auto kernel = kernel_extract(spec, grid);
    double lowest = kernel[0].real();
    double negative = 0.0;
    double total = 0.0;
    for (const auto& v : kernel.values()) {
        lowest = std::min(lowest, v.real());
        negative += std::max(0.0, -v.real());
        total += std::abs(v.real());
    }
    return {lowest, total > 0.0 ? negative / total : 0.0};
}

SpectralField lift(const SpectralField& u, double r) {
    return apply_radial_multiplier(u, [r](double xi) { return std::pow(1.0 + xi * xi, 0.5 * r); });
}

}  // namespace caloric
