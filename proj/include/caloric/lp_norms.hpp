#pragma once

#include "caloric/spectral_grid.hpp"

#include <array>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace caloric {

inline constexpr double infinity = std::numeric_limits<double>::infinity();

enum class Scale { besov, triebel };

/// (scale, s, p, q) naming one of the quasi-norms B^s_{p,q} or F^s_{p,q}.
struct NormSpec {
    Scale scale = Scale::besov;
    double s = 0.0;
    double p = 2.0;
    double q = 2.0;

    /// Throws DomainError for p or q outside (0, inf].
    void validate() const;
    std::string label() const;
};

/// Q_{J,M} = 2^{-J} M + 2^{-J}(0,1)^n, anchored at the box corner, with the grid points it holds.
struct DyadicCube {
    int level = 0;
    std::array<long, 2> index{};
    std::vector<std::size_t> points;
};

/// Largest J with 2^{-J} >= 4 dx; -1 when even unit cubes hold fewer than four points per side.
int cube_level_max(const TorusGrid& grid);
std::vector<DyadicCube> dyadic_cubes(const TorusGrid& grid, int level);

/// Grid quadrature (dV sum |u|^p)^{1/p}; max |u| for p = inf. Quasi-norm for p < 1.
double lp_norm(const SpectralField& u, double p);

/// l_q (quasi-)norm of a finite sequence.
double sequence_norm(std::span<const double> a, double q);

/// Throws ResolutionError when more than 1e-6 of the energy sits above 2^{k_max - 1}.
void check_resolution(const SpectralField& u, const DyadicPartition& partition);

/// phi_k(D) u for k = 0..k_max, physical representation.
std::vector<SpectralField> block_decompose(const SpectralField& u, const DyadicPartition& partition);

/// a_k = ||phi_k(D) u | L_p||. For p = 2 the norms come from the spectrum (Parseval).
std::vector<double> block_lp_norms(const SpectralField& u, const DyadicPartition& partition, double p);

double besov_norm(const SpectralField& u, const DyadicPartition& partition, double s, double p, double q);
/// p < inf.
double triebel_norm(const SpectralField& u, const DyadicPartition& partition, double s, double p, double q);
/// F_{inf,q}, q < inf, as sup over cubes of (mean_Q sum_{k >= J} 2^{ksq} |phi_k(D) u|^q)^{1/q}.
double triebel_inf_q_norm(const SpectralField& u, const DyadicPartition& partition, double s, double q);
/// The same norm in the 2^{Jn/q} (int_Q ...)^{1/q} form.
double triebel_inf_q_norm_prefactor(const SpectralField& u, const DyadicPartition& partition, double s, double q);
double triebel_inf_inf_norm(const SpectralField& u, const DyadicPartition& partition, double s);

/// Dispatches on the scale and on p, q.
double norm(const SpectralField& u, const DyadicPartition& partition, const NormSpec& spec);

/// Block L2 norms from frequency-representation entries; used by the experiment
/// drivers to evaluate p = 2 norms over sparse spectra.
struct SpectralEntry {
    double xi_abs;
    Complex value;
};
std::vector<SpectralEntry> nonzero_entries(const SpectralField& spectrum);
std::vector<double> block_l2_norms(std::span<const SpectralEntry> entries, const DyadicPartition& partition,
                                   double cell_volume);

}  // namespace caloric
