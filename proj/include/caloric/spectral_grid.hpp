#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

namespace caloric {

using Complex = std::complex<double>;

/// Periodic box [-L, L)^n sampled by N points per axis, n in {1, 2}.
///
/// Frequencies live on the lattice (pi/L) * j, j in {-N/2, ..., N/2 - 1}; the
/// flat storage is row-major with axis 0 slowest and FFT index order per axis.
class TorusGrid {
  public:
    TorusGrid(int dim, std::size_t points_per_axis, double half_length);

    int dim() const noexcept { return dim_; }
    std::size_t points_per_axis() const noexcept { return n_; }
    double half_length() const noexcept { return half_length_; }

    std::size_t size() const noexcept { return dim_ == 1 ? n_ : n_ * n_; }
    double spacing() const noexcept { return 2.0 * half_length_ / static_cast<double>(n_); }
    double cell_volume() const noexcept;
    double volume() const noexcept;
    double frequency_step() const noexcept;
    double nyquist() const noexcept;
    /// floor(log2(nyquist)): the last dyadic block the grid carries.
    int k_max() const noexcept;

    double coordinate(std::size_t axis_index) const noexcept;
    /// Signed wavenumber j of an axis index in FFT order.
    long wavenumber(std::size_t axis_index) const noexcept;
    std::array<std::size_t, 2> axis_indices(std::size_t flat) const noexcept;
    std::array<double, 2> frequency(std::size_t flat) const noexcept;
    double frequency_abs(std::size_t flat) const noexcept;
    std::array<double, 2> point(std::size_t flat) const noexcept;

    bool operator==(const TorusGrid&) const = default;

  private:
    int dim_;
    std::size_t n_;
    double half_length_;
};

/// Smallest power-of-two grid with nyquist >= min_nyquist for the given box.
TorusGrid grid_with_nyquist(int dim, double half_length, double min_nyquist);

enum class Representation { physical, frequency };

/// Complex samples of a field in either representation, tagged.
class SpectralField {
  public:
    SpectralField(TorusGrid grid, Representation rep, std::vector<Complex> values);

    static SpectralField zeros(const TorusGrid& grid, Representation rep = Representation::physical);
    /// Physical samples of a real function u(x) (1-D) or u(x, y) (2-D).
    static SpectralField sample(const TorusGrid& grid, const std::function<double(double, double)>& u);

    const TorusGrid& grid() const noexcept { return grid_; }
    Representation representation() const noexcept { return rep_; }
    std::span<const Complex> values() const noexcept { return values_; }
    std::span<Complex> values() noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    Complex operator[](std::size_t i) const noexcept { return values_[i]; }
    Complex& operator[](std::size_t i) noexcept { return values_[i]; }

    SpectralField& operator+=(const SpectralField& other);
    SpectralField& operator-=(const SpectralField& other);
    SpectralField& operator*=(double c);

  private:
    TorusGrid grid_;
    Representation rep_;
    std::vector<Complex> values_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double c, SpectralField a);

/// Unitary DFT (1/sqrt(size) both ways). Throws RepresentationError on a tag mismatch.
SpectralField transform_forward(const SpectralField& field);
SpectralField transform_inverse(const SpectralField& field);
/// Forward transform unless the field is already in frequency representation.
SpectralField to_frequency(const SpectralField& field);
SpectralField to_physical(const SpectralField& field);

struct Frequency {
    std::array<double, 2> xi;
    double abs;
};

using Multiplier = std::function<Complex(const Frequency&)>;
using RadialMultiplier = std::function<double(double)>;

/// F^{-1}(m * F u) for a physical field. Throws NonFiniteError when m is not
/// finite at a lattice point.
SpectralField apply_multiplier(const SpectralField& field, const Multiplier& m);
SpectralField apply_radial_multiplier(const SpectralField& field, const RadialMultiplier& m);

/// Multiplies frequency-representation values in place by m(|xi|).
void scale_spectrum(SpectralField& spectrum, const RadialMultiplier& m);

double l2_norm(std::span<const Complex> values);
double max_abs(std::span<const Complex> values);

/// Smooth dyadic resolution of unity phi_0, phi_1, ... on the frequency lattice.
///
/// phi_0 is the radial bump equal to 1 on |xi| <= 1, exp(1 - 1/(1 - ((r-1)/0.5)^2))
/// on 1 < r < 3/2 and 0 beyond; phi_k(xi) = phi_0(2^{-k} xi) - phi_0(2^{-k+1} xi).
class DyadicPartition {
  public:
    explicit DyadicPartition(const TorusGrid& grid);

    static double phi0(double r) noexcept;

    const TorusGrid& grid() const noexcept { return grid_; }
    int k_max() const noexcept { return k_max_; }
    int block_count() const noexcept { return k_max_ + 1; }
    double value(int k, double r) const noexcept;
    /// Blocks that can be nonzero at radius r (at most two consecutive k).
    std::pair<int, int> active_blocks(double r) const noexcept;
    /// phi_k tabulated on the lattice in flat storage order.
    std::vector<double> table(int k) const;

  private:
    TorusGrid grid_;
    int k_max_;
};

/// Throws ResolutionError when the grid carries fewer than three blocks.
DyadicPartition build_partition(const TorusGrid& grid);

/// CSV rows "index,real,imag" with 17 significant digits.
void write_field_csv(std::ostream& out, const SpectralField& field);
SpectralField read_field_csv(std::istream& in, const TorusGrid& grid, Representation rep);

}  // namespace caloric
