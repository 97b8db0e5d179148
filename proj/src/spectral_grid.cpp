#include "caloric/spectral_grid.hpp"

#include "caloric/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>

namespace caloric {

TorusGrid::TorusGrid(int dim, std::size_t points_per_axis, double half_length)
    : dim_(dim), n_(points_per_axis), half_length_(half_length) {
    if (dim != 1 && dim != 2) {
        throw DomainError("torus grids are 1-D or 2-D");
    }
    if (n_ < 4 || !std::has_single_bit(n_)) {
        throw DomainError("points per axis must be a power of two >= 4, got " + std::to_string(n_));
    }
    if (!(half_length > 0.0) || !std::isfinite(half_length)) {
        throw DomainError("box half length must be positive");
    }
}

double TorusGrid::cell_volume() const noexcept {
    return dim_ == 1 ? spacing() : spacing() * spacing();
}

double TorusGrid::volume() const noexcept {
    const double side = 2.0 * half_length_;
    return dim_ == 1 ? side : side * side;
}

double TorusGrid::frequency_step() const noexcept { return std::numbers::pi / half_length_; }

double TorusGrid::nyquist() const noexcept { return frequency_step() * static_cast<double>(n_ / 2); }

int TorusGrid::k_max() const noexcept { return static_cast<int>(std::floor(std::log2(nyquist()))); }

double TorusGrid::coordinate(std::size_t axis_index) const noexcept {
    return -half_length_ + spacing() * static_cast<double>(axis_index);
}

long TorusGrid::wavenumber(std::size_t axis_index) const noexcept {
    const auto j = static_cast<long>(axis_index);
    const auto n = static_cast<long>(n_);
    return j < n / 2 ? j : j - n;
}

std::array<std::size_t, 2> TorusGrid::axis_indices(std::size_t flat) const noexcept {
    if (dim_ == 1) return {flat, 0};
    return {flat / n_, flat % n_};
}

std::array<double, 2> TorusGrid::frequency(std::size_t flat) const noexcept {
    const auto [i, j] = axis_indices(flat);
    const double step = frequency_step();
    if (dim_ == 1) return {step * static_cast<double>(wavenumber(i)), 0.0};
    return {step * static_cast<double>(wavenumber(i)), step * static_cast<double>(wavenumber(j))};
}

double TorusGrid::frequency_abs(std::size_t flat) const noexcept {
    const auto xi = frequency(flat);
    return std::hypot(xi[0], xi[1]);
}

std::array<double, 2> TorusGrid::point(std::size_t flat) const noexcept {
    const auto [i, j] = axis_indices(flat);
    if (dim_ == 1) return {coordinate(i), 0.0};
    return {coordinate(i), coordinate(j)};
}

TorusGrid grid_with_nyquist(int dim, double half_length, double min_nyquist) {
    std::size_t n = 4;
    while (std::numbers::pi / half_length * static_cast<double>(n / 2) < min_nyquist) {
        n *= 2;
        if (n > (std::size_t{1} << 26)) {
            throw DomainError("requested Nyquist frequency needs an unreasonably large grid");
        }
    }
    return TorusGrid(dim, n, half_length);
}

// ---------------------------------------------------------------------------

SpectralField::SpectralField(TorusGrid grid, Representation rep, std::vector<Complex> values)
    : grid_(grid), rep_(rep), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
        throw DomainError("field has " + std::to_string(values_.size()) + " values, grid needs " +
                          std::to_string(grid_.size()));
    }
}

SpectralField SpectralField::zeros(const TorusGrid& grid, Representation rep) {
    return SpectralField(grid, rep, std::vector<Complex>(grid.size()));
}

SpectralField SpectralField::sample(const TorusGrid& grid, const std::function<double(double, double)>& u) {
    std::vector<Complex> values(grid.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto p = grid.point(i);
        values[i] = u(p[0], p[1]);
    }
    return SpectralField(grid, Representation::physical, std::move(values));
}

namespace {

void require_compatible(const SpectralField& a, const SpectralField& b) {
    if (!(a.grid() == b.grid()) || a.representation() != b.representation()) {
        throw RepresentationError("fields differ in grid or representation");
    }
}

}  // namespace

SpectralField& SpectralField::operator+=(const SpectralField& other) {
    require_compatible(*this, other);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
    require_compatible(*this, other);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
    return *this;
}

SpectralField& SpectralField::operator*=(double c) {
    for (auto& v : values_) v *= c;
    return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double c, SpectralField a) { return a *= c; }

// ---------------------------------------------------------------------------

namespace {

class PlanCache {
  public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    fftw_plan get(int dim, std::size_t n, int sign) {
        std::lock_guard lock(mutex_);
        const auto key = std::make_tuple(dim, n, sign);
        if (auto it = plans_.find(key); it != plans_.end()) {
            return it->second;
        }
        const std::size_t total = dim == 1 ? n : n * n;
        auto* buffer = fftw_alloc_complex(total);
        const int ni = static_cast<int>(n);
        fftw_plan plan = dim == 1
                             ? fftw_plan_dft_1d(ni, buffer, buffer, sign, FFTW_ESTIMATE | FFTW_UNALIGNED)
                             : fftw_plan_dft_2d(ni, ni, buffer, buffer, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(buffer);
        plans_.emplace(key, plan);
        return plan;
    }

    PlanCache(const PlanCache&) = delete;
    PlanCache& operator=(const PlanCache&) = delete;

  private:
    PlanCache() = default;
    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    std::mutex mutex_;
    std::map<std::tuple<int, std::size_t, int>, fftw_plan> plans_;
};

SpectralField run_transform(const SpectralField& field, int sign, Representation out_rep) {
    std::vector<Complex> values(field.values().begin(), field.values().end());
    const auto& grid = field.grid();
    fftw_plan plan = PlanCache::instance().get(grid.dim(), grid.points_per_axis(), sign);
    auto* data = reinterpret_cast<fftw_complex*>(values.data());
    fftw_execute_dft(plan, data, data);
    const double scale = 1.0 / std::sqrt(static_cast<double>(values.size()));
    for (auto& v : values) v *= scale;
    return SpectralField(grid, out_rep, std::move(values));
}

}  // namespace

SpectralField transform_forward(const SpectralField& field) {
    if (field.representation() != Representation::physical) {
        throw RepresentationError("forward transform expects a physical field");
    }
    return run_transform(field, FFTW_FORWARD, Representation::frequency);
}

SpectralField transform_inverse(const SpectralField& field) {
    if (field.representation() != Representation::frequency) {
        throw RepresentationError("inverse transform expects a frequency field");
    }
    return run_transform(field, FFTW_BACKWARD, Representation::physical);
}

SpectralField to_frequency(const SpectralField& field) {
    return field.representation() == Representation::frequency ? field : transform_forward(field);
}

SpectralField to_physical(const SpectralField& field) {
    return field.representation() == Representation::physical ? field : transform_inverse(field);
}

SpectralField apply_multiplier(const SpectralField& field, const Multiplier& m) {
    if (field.representation() != Representation::physical) {
        throw RepresentationError("multipliers are applied to physical fields");
    }
    auto spectrum = transform_forward(field);
    const auto& grid = field.grid();
    for (std::size_t i = 0; i < spectrum.size(); ++i) {
        const auto xi = grid.frequency(i);
        const Complex value = m(Frequency{xi, std::hypot(xi[0], xi[1])});
        if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
            throw NonFiniteError("multiplier is not finite at |xi| = " + std::to_string(std::hypot(xi[0], xi[1])));
        }
        spectrum[i] *= value;
    }
    return transform_inverse(spectrum);
}

void scale_spectrum(SpectralField& spectrum, const RadialMultiplier& m) {
    if (spectrum.representation() != Representation::frequency) {
        throw RepresentationError("scale_spectrum expects a frequency field");
    }
    const auto& grid = spectrum.grid();
    // Radial multipliers are evaluated once per distinct lattice radius in 1-D.
    if (grid.dim() == 1) {
        const std::size_t n = grid.points_per_axis();
        std::vector<double> by_abs_index(n / 2 + 1);
        for (std::size_t j = 0; j <= n / 2; ++j) {
            by_abs_index[j] = m(grid.frequency_step() * static_cast<double>(j));
            if (!std::isfinite(by_abs_index[j])) {
                throw NonFiniteError("multiplier is not finite at |xi| = " +
                                     std::to_string(grid.frequency_step() * static_cast<double>(j)));
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            spectrum[i] *= by_abs_index[static_cast<std::size_t>(std::labs(grid.wavenumber(i)))];
        }
        return;
    }
    for (std::size_t i = 0; i < spectrum.size(); ++i) {
        const double value = m(grid.frequency_abs(i));
        if (!std::isfinite(value)) {
            throw NonFiniteError("multiplier is not finite at |xi| = " + std::to_string(grid.frequency_abs(i)));
        }
        spectrum[i] *= value;
    }
}

SpectralField apply_radial_multiplier(const SpectralField& field, const RadialMultiplier& m) {
    if (field.representation() != Representation::physical) {
        throw RepresentationError("multipliers are applied to physical fields");
    }
    auto spectrum = transform_forward(field);
    scale_spectrum(spectrum, m);
    return transform_inverse(spectrum);
}

double l2_norm(std::span<const Complex> values) {
    double sum = 0.0;
    for (const auto& v : values) sum += std::norm(v);
    return std::sqrt(sum);
}

double max_abs(std::span<const Complex> values) {
    double best = 0.0;
    for (const auto& v : values) best = std::max(best, std::abs(v));
    return best;
}

// ---------------------------------------------------------------------------

DyadicPartition::DyadicPartition(const TorusGrid& grid) : grid_(grid), k_max_(grid.k_max()) {}

double DyadicPartition::phi0(double r) noexcept {
    if (r <= 1.0) return 1.0;
    if (r >= 1.5) return 0.0;
    const double x = (r - 1.0) / 0.5;
    return std::exp(1.0 - 1.0 / (1.0 - x * x));
}

double DyadicPartition::value(int k, double r) const noexcept {
    if (k < 0 || k > k_max_) return 0.0;
    if (k == 0) return phi0(r);
    return phi0(std::ldexp(r, -k)) - phi0(std::ldexp(r, -k + 1));
}

std::pair<int, int> DyadicPartition::active_blocks(double r) const noexcept {
    if (r < 1.5) {
        // phi_0 and phi_1 (phi_1 vanishes below 1).
        return {0, std::min(1, k_max_)};
    }
    // phi_k is supported in 2^{k-1} < r < 3 * 2^{k-1}.
    const int lo = std::max(0, static_cast<int>(std::floor(std::log2(r / 1.5))) + 1);
    const int hi = std::min(k_max_, lo + 1);
    return {std::min(lo, k_max_), hi};
}

std::vector<double> DyadicPartition::table(int k) const {
    std::vector<double> out(grid_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = value(k, grid_.frequency_abs(i));
    return out;
}

DyadicPartition build_partition(const TorusGrid& grid) {
    if (grid.k_max() < 2) {
        throw ResolutionError("grid Nyquist " + std::to_string(grid.nyquist()) +
                              " is too coarse for a dyadic partition with k_max >= 2");
    }
    return DyadicPartition(grid);
}

// ---------------------------------------------------------------------------

void write_field_csv(std::ostream& out, const SpectralField& field) {
    out << "index,real,imag\n";
    out << std::setprecision(17);
    for (std::size_t i = 0; i < field.size(); ++i) {
        out << i << ',' << field[i].real() << ',' << field[i].imag() << '\n';
    }
}

SpectralField read_field_csv(std::istream& in, const TorusGrid& grid, Representation rep) {
    std::vector<Complex> values(grid.size());
    std::string line;
    std::getline(in, line);  // header
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::size_t index = 0;
        double re = 0.0;
        double im = 0.0;
        char c1 = 0;
        char c2 = 0;
        if (!(row >> index >> c1 >> re >> c2 >> im) || c1 != ',' || c2 != ',' || index >= values.size()) {
            throw DomainError("malformed field CSV row: " + line);
        }
        values[index] = {re, im};
        ++rows;
    }
    if (rows != values.size()) {
        throw DomainError("field CSV has " + std::to_string(rows) + " rows, grid needs " +
                          std::to_string(values.size()));
    }
    return SpectralField(grid, rep, std::move(values));
}

}  // namespace caloric
