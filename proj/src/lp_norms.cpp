#include "caloric/lp_norms.hpp"

#include "caloric/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace caloric {

void NormSpec::validate() const {
    if (!(p > 0.0) || !(q > 0.0) || std::isnan(s) || std::isinf(s)) {
        throw DomainError("norm parameters need p, q in (0, inf] and finite s: " + label());
    }
}

std::string NormSpec::label() const {
    std::ostringstream out;
    out << (scale == Scale::besov ? 'B' : 'F') << "^" << s << "_{" << p << "," << q << "}";
    return out.str();
}

int cube_level_max(const TorusGrid& grid) {
    const double min_side = 4.0 * grid.spacing();
    if (min_side > 1.0) return -1;
    return static_cast<int>(std::floor(-std::log2(min_side)));
}

std::vector<DyadicCube> dyadic_cubes(const TorusGrid& grid, int level) {
    const double side = std::ldexp(1.0, -level);
    const double corner = -grid.half_length();
    std::map<std::array<long, 2>, std::size_t> slot;
    std::vector<DyadicCube> cubes;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto x = grid.point(i);
        std::array<long, 2> m{static_cast<long>(std::floor((x[0] - corner) / side)), 0};
        if (grid.dim() == 2) m[1] = static_cast<long>(std::floor((x[1] - corner) / side));
        auto [it, inserted] = slot.try_emplace(m, cubes.size());
        if (inserted) cubes.push_back(DyadicCube{level, m, {}});
        cubes[it->second].points.push_back(i);
    }
    return cubes;
}

double lp_norm(const SpectralField& field, double p) {
    if (!(p > 0.0)) throw DomainError("lp_norm needs p > 0");
    const auto u = to_physical(field);
    if (std::isinf(p)) return max_abs(u.values());
    double sum = 0.0;
    if (p == 2.0) {
        for (const auto& v : u.values()) sum += std::norm(v);
        return std::sqrt(u.grid().cell_volume() * sum);
    }
    for (const auto& v : u.values()) sum += std::pow(std::abs(v), p);
    return std::pow(u.grid().cell_volume() * sum, 1.0 / p);
}

double sequence_norm(std::span<const double> a, double q) {
    if (!(q > 0.0)) throw DomainError("sequence_norm needs q > 0");
    if (std::isinf(q)) {
        double best = 0.0;
        for (double v : a) best = std::max(best, std::abs(v));
        return best;
    }
    double sum = 0.0;
    for (double v : a) sum += std::pow(std::abs(v), q);
    return std::pow(sum, 1.0 / q);
}

namespace {

void require_matching(const SpectralField& u, const DyadicPartition& partition) {
    if (!(u.grid() == partition.grid())) {
        throw RepresentationError("field and partition live on different grids");
    }
}

void check_spectrum_resolution(const SpectralField& spectrum, const DyadicPartition& partition) {
    const auto& grid = spectrum.grid();
    const double cutoff = std::ldexp(1.0, partition.k_max() - 1);
    double total = 0.0;
    double high = 0.0;
    for (std::size_t i = 0; i < spectrum.size(); ++i) {
        const double e = std::norm(spectrum[i]);
        total += e;
        if (grid.frequency_abs(i) > cutoff) high += e;
    }
    if (total > 0.0 && high > 1e-6 * total) {
        throw ResolutionError("field carries " + std::to_string(high / total) + " of its energy above |xi| = " +
                              std::to_string(cutoff) + ", beyond what the partition resolves");
    }
}

}  // namespace

void check_resolution(const SpectralField& u, const DyadicPartition& partition) {
    require_matching(u, partition);
    check_spectrum_resolution(to_frequency(u), partition);
}

std::vector<SpectralField> block_decompose(const SpectralField& u, const DyadicPartition& partition) {
    require_matching(u, partition);
    const auto spectrum = to_frequency(u);
    check_spectrum_resolution(spectrum, partition);
    const auto& grid = u.grid();
    std::vector<SpectralField> blocks;
    blocks.reserve(static_cast<std::size_t>(partition.block_count()));
    for (int k = 0; k <= partition.k_max(); ++k) {
        auto block = spectrum;
        for (std::size_t i = 0; i < block.size(); ++i) block[i] *= partition.value(k, grid.frequency_abs(i));
        blocks.push_back(transform_inverse(block));
    }
    return blocks;
}

std::vector<SpectralEntry> nonzero_entries(const SpectralField& spectrum) {
    if (spectrum.representation() != Representation::frequency) {
        throw RepresentationError("nonzero_entries expects a frequency field");
    }
    std::vector<SpectralEntry> out;
    for (std::size_t i = 0; i < spectrum.size(); ++i) {
        if (spectrum[i] != Complex(0.0, 0.0)) out.push_back({spectrum.grid().frequency_abs(i), spectrum[i]});
    }
    return out;
}

std::vector<double> block_l2_norms(std::span<const SpectralEntry> entries, const DyadicPartition& partition,
                                   double cell_volume) {
    std::vector<double> sums(static_cast<std::size_t>(partition.block_count()), 0.0);
    for (const auto& e : entries) {
        const auto [lo, hi] = partition.active_blocks(e.xi_abs);
        for (int k = lo; k <= hi; ++k) {
            const double phi = partition.value(k, e.xi_abs);
            sums[static_cast<std::size_t>(k)] += phi * phi * std::norm(e.value);
        }
    }
    for (auto& v : sums) v = std::sqrt(cell_volume * v);
    return sums;
}

std::vector<double> block_lp_norms(const SpectralField& u, const DyadicPartition& partition, double p) {
    require_matching(u, partition);
    if (p == 2.0) {
        const auto spectrum = to_frequency(u);
        check_spectrum_resolution(spectrum, partition);
        return block_l2_norms(nonzero_entries(spectrum), partition, u.grid().cell_volume());
    }
    std::vector<double> out;
    for (const auto& block : block_decompose(u, partition)) out.push_back(lp_norm(block, p));
    return out;
}

double besov_norm(const SpectralField& u, const DyadicPartition& partition, double s, double p, double q) {
    NormSpec{Scale::besov, s, p, q}.validate();
    auto a = block_lp_norms(u, partition, p);
    for (std::size_t k = 0; k < a.size(); ++k) a[k] *= std::pow(2.0, static_cast<double>(k) * s);
    return sequence_norm(a, q);
}

double triebel_norm(const SpectralField& u, const DyadicPartition& partition, double s, double p, double q) {
    NormSpec{Scale::triebel, s, p, q}.validate();
    if (std::isinf(p)) throw DomainError("triebel_norm needs p < inf; use the dyadic-cube evaluators");
    const auto blocks = block_decompose(u, partition);
    const auto& grid = u.grid();
    auto pointwise = SpectralField::zeros(grid);
    std::vector<double> column(blocks.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (std::size_t k = 0; k < blocks.size(); ++k) {
            column[k] = std::pow(2.0, static_cast<double>(k) * s) * std::abs(blocks[k][i]);
        }
        pointwise[i] = sequence_norm(column, q);
    }
    return lp_norm(pointwise, p);
}

namespace {

/// Tail sums S_J(x) = sum_{k >= J} 2^{ksq} |phi_k(D) u(x)|^q for J = 0..k_max.
std::vector<std::vector<double>> tail_sums(const std::vector<SpectralField>& blocks, double s, double q) {
    const std::size_t n = blocks.front().size();
    std::vector<std::vector<double>> sums(blocks.size(), std::vector<double>(n, 0.0));
    std::vector<double> running(n, 0.0);
    for (std::size_t k = blocks.size(); k-- > 0;) {
        const double weight = std::pow(2.0, static_cast<double>(k) * s * q);
        for (std::size_t i = 0; i < n; ++i) running[i] += weight * std::pow(std::abs(blocks[k][i]), q);
        sums[k] = running;
    }
    return sums;
}

template <typename CubeValue>
double sup_over_cubes(const SpectralField& u, const DyadicPartition& partition, double s, double q, CubeValue value) {
    if (!(q > 0.0) || std::isinf(q)) throw DomainError("F_{inf,q} evaluator needs 0 < q < inf");
    const auto& grid = u.grid();
    const int level_max = cube_level_max(grid);
    if (level_max < 0) {
        throw ResolutionError("grid spacing too coarse for dyadic cubes with four points per side");
    }
    const auto blocks = block_decompose(u, partition);
    const auto sums = tail_sums(blocks, s, q);
    double best = 0.0;
    const int top = std::min(level_max, partition.k_max());
    for (int level = 0; level <= top; ++level) {
        const auto& tail = sums[static_cast<std::size_t>(level)];
        for (const auto& cube : dyadic_cubes(grid, level)) {
            if (cube.points.empty()) continue;
            double sum = 0.0;
            for (auto i : cube.points) sum += tail[i];
            best = std::max(best, value(level, sum, cube.points.size()));
        }
    }
    return std::pow(best, 1.0 / q);
}

}  // namespace

double triebel_inf_q_norm(const SpectralField& u, const DyadicPartition& partition, double s, double q) {
    return sup_over_cubes(u, partition, s, q,
                          [](int, double sum, std::size_t count) { return sum / static_cast<double>(count); });
}

double triebel_inf_q_norm_prefactor(const SpectralField& u, const DyadicPartition& partition, double s, double q) {
    const double dv = u.grid().cell_volume();
    const int n = u.grid().dim();
    return sup_over_cubes(u, partition, s, q, [dv, n](int level, double sum, std::size_t) {
        return std::ldexp(1.0, level * n) * dv * sum;
    });
}

double triebel_inf_inf_norm(const SpectralField& u, const DyadicPartition& partition, double s) {
    // Every grid point lies in a cube at level J = 0, and k >= 0 there, so the
    // sup over (J, M, x, k >= J) is the sup over (k, x).
    const auto blocks = block_decompose(u, partition);
    double best = 0.0;
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        best = std::max(best, std::pow(2.0, static_cast<double>(k) * s) * max_abs(blocks[k].values()));
    }
    return best;
}

double norm(const SpectralField& u, const DyadicPartition& partition, const NormSpec& spec) {
    spec.validate();
    if (spec.scale == Scale::besov) return besov_norm(u, partition, spec.s, spec.p, spec.q);
    if (!std::isinf(spec.p)) return triebel_norm(u, partition, spec.s, spec.p, spec.q);
    if (!std::isinf(spec.q)) return triebel_inf_q_norm(u, partition, spec.s, spec.q);
    return triebel_inf_inf_norm(u, partition, spec.s);
}

}  // namespace caloric
