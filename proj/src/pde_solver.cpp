#include "caloric/pde_solver.hpp"

#include "caloric/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace caloric {

namespace {

/// True when every axis wavenumber of flat index i satisfies |j| <= limit.
bool within(const TorusGrid& grid, std::size_t i, double limit) {
    const auto [a, b] = grid.axis_indices(i);
    if (std::abs(static_cast<double>(grid.wavenumber(a))) > limit) return false;
    return grid.dim() == 1 || std::abs(static_cast<double>(grid.wavenumber(b))) <= limit;
}

double energy_fraction_beyond(const SpectralField& spectrum, double limit) {
    double total = 0.0;
    double outside = 0.0;
    for (std::size_t i = 0; i < spectrum.size(); ++i) {
        const double e = std::norm(spectrum[i]);
        total += e;
        if (!within(spectrum.grid(), i, limit)) outside += e;
    }
    return total > 0.0 ? outside / total : 0.0;
}

SpectralField real_part(SpectralField u) {
    for (auto& v : u.values()) v = Complex(v.real(), 0.0);
    return u;
}

/// exp(-dt |xi|^{2 beta}) per flat frequency index.
std::vector<double> step_multiplier(const CauchyProblem& problem) {
    const auto& grid = problem.grid();
    std::vector<double> e(grid.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
        const double xi = grid.frequency_abs(i);
        e[i] = std::exp(-problem.dt() * std::pow(xi * xi, problem.beta));
    }
    return e;
}

/// Spectrum of div[u^2] with both factors and the product truncated to |j| <= N/3.
SpectralField div_square_spectrum(const SpectralField& u) {
    const auto& grid = u.grid();
    auto spectrum = to_frequency(u);
    const double cutoff = static_cast<double>(grid.points_per_axis()) / 3.0;
    if (energy_fraction_beyond(spectrum, cutoff) > 1e-12) {
        throw AliasingError("field has energy beyond the 2/3 dealiasing cutoff");
    }
    for (std::size_t i = 0; i < spectrum.size(); ++i) {
        if (!within(grid, i, cutoff)) spectrum[i] = 0.0;
    }
    auto square = transform_inverse(spectrum);
    for (auto& v : square.values()) v = Complex(v.real() * v.real(), 0.0);
    auto out = transform_forward(square);
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!within(grid, i, cutoff)) {
            out[i] = 0.0;
            continue;
        }
        const auto xi = grid.frequency(i);
        double sum = xi[0];
        if (grid.dim() == 2) sum += xi[1];
        out[i] *= Complex(0.0, sum);
    }
    return out;
}

}  // namespace

void CauchyProblem::validate() const {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("beta must be positive");
    if (beta < 1.0 && !experimental) {
        throw DomainError("beta < 1 is outside the solver's contract; enable the experimental flag to run it");
    }
    if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("final time T must be positive");
    if (t_steps < 1) throw DomainError("t_steps must be >= 1");
    const double limit = static_cast<double>(grid().points_per_axis()) / 4.0;
    if (energy_fraction_beyond(to_frequency(u0), limit) > 1e-12) {
        throw AliasingError("initial data must be band-limited below half the Nyquist frequency");
    }
}

double sup_norm(const SpectralField& u) { return max_abs(to_physical(u).values()); }

SpectralField div_square(const SpectralField& u) { return real_part(transform_inverse(div_square_spectrum(u))); }

TimePath linear_evolution(const CauchyProblem& problem) {
    problem.validate();
    const auto e = step_multiplier(problem);
    auto current = to_frequency(problem.u0);
    TimePath path;
    path.reserve(static_cast<std::size_t>(problem.t_steps) + 1);
    path.push_back(real_part(transform_inverse(current)));
    for (int k = 1; k <= problem.t_steps; ++k) {
        for (std::size_t i = 0; i < current.size(); ++i) current[i] *= e[i];
        path.push_back(real_part(transform_inverse(current)));
    }
    return path;
}

TimePath duhamel_apply(const CauchyProblem& problem, const TimePath& path) {
    problem.validate();
    if (path.size() != static_cast<std::size_t>(problem.t_steps) + 1) {
        throw DomainError("path must hold t_steps + 1 slices");
    }
    const auto e = step_multiplier(problem);
    const double dt = problem.dt();
    auto linear = to_frequency(problem.u0);
    // S_k = sum_j c_j E^{k-j} N_j with c_0 = 1/2, c_j = 1, so that the trapezoid sum is dt (S_k - N_k / 2).
    auto forcing = div_square_spectrum(path[0]);
    auto running = forcing;
    running *= 0.5;
    TimePath out;
    out.reserve(path.size());
    out.push_back(real_part(transform_inverse(linear)));
    for (int k = 1; k <= problem.t_steps; ++k) {
        forcing = div_square_spectrum(path[static_cast<std::size_t>(k)]);
        auto slice = linear;
        for (std::size_t i = 0; i < running.size(); ++i) {
            linear[i] *= e[i];
            running[i] = running[i] * e[i] + forcing[i];
            slice[i] = linear[i] + dt * (running[i] - 0.5 * forcing[i]);
        }
        out.push_back(real_part(transform_inverse(slice)));
    }
    return out;
}

double weighted_time_norm(const TimePath& path, double T, double a, double b, const SliceNorm& norm) {
    if (!(a > 0.0)) throw DomainError("time exponent a must lie in (0, inf]");
    if (!(b >= 0.0)) throw DomainError("time weight b must be >= 0");
    if (path.size() < 2) throw DomainError("weighted time norm needs at least two slices");
    const double dt = T / static_cast<double>(path.size() - 1);
    if (std::isinf(a)) {
        double best = 0.0;
        for (std::size_t k = 0; k < path.size(); ++k) {
            const double t = dt * static_cast<double>(k);
            const double weight = b == 0.0 ? 1.0 : std::pow(t, b);
            best = std::max(best, weight * norm(path[k]));
        }
        return best;
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < path.size(); ++k) {
        const double t = dt * static_cast<double>(k);
        const double weight = a * b == 0.0 ? 1.0 : std::pow(t, a * b);
        const double value = weight * std::pow(norm(path[k]), a);
        sum += (k == 0 || k + 1 == path.size()) ? 0.5 * value : value;
    }
    return std::pow(dt * sum, 1.0 / a);
}

double weighted_time_norm(const TimePath& path, double T, double a, double b, const NormSpec& spec) {
    if (path.empty()) throw DomainError("weighted time norm needs at least two slices");
    const DyadicPartition partition(path.front().grid());
    return weighted_time_norm(path, T, a, b, [&](const SpectralField& u) { return norm(u, partition, spec); });
}

double MildSolverState::contraction_factor() const noexcept {
    if (contraction_factors.empty()) return 0.0;
    return *std::max_element(contraction_factors.begin(), contraction_factors.end());
}

namespace {

double path_distance(const TimePath& a, const TimePath& b, double T, const SolverOptions& options) {
    TimePath diff;
    diff.reserve(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) diff.push_back(a[k] - b[k]);
    const SliceNorm slice = options.slice_norm ? options.slice_norm : SliceNorm(sup_norm);
    return weighted_time_norm(diff, T, options.a, options.b, slice);
}

}  // namespace

MildSolverState fixed_point_solve(const CauchyProblem& problem, const SolverOptions& options) {
    if (!(options.tol > 0.0)) throw DomainError("solver tolerance must be positive");
    if (options.max_iter < 1) throw DomainError("max_iter must be >= 1");
    MildSolverState state;
    state.iterate = linear_evolution(problem);
    int growing = 0;
    while (state.iterations < options.max_iter) {
        auto next = duhamel_apply(problem, state.iterate);
        const double diff = path_distance(next, state.iterate, problem.T, options);
        state.iterate = std::move(next);
        ++state.iterations;
        if (!std::isfinite(diff)) {
            state.diverged = true;
            state.diff_history.push_back(diff);
            state.message = "iterate became non-finite";
            return state;
        }
        if (!state.diff_history.empty() && state.diff_history.back() > 0.0) {
            state.contraction_factors.push_back(diff / state.diff_history.back());
            growing = diff > state.diff_history.back() ? growing + 1 : 0;
        }
        state.diff_history.push_back(diff);
        if (diff < options.tol) {
            state.converged = true;
            std::ostringstream msg;
            msg << "converged after " << state.iterations << " iterations";
            state.message = msg.str();
            return state;
        }
        if (growing >= 3) {
            state.diverged = true;
            state.message = "successive differences grew for 3 consecutive iterations";
            return state;
        }
    }
    state.message = "max_iter reached without convergence";
    return state;
}

double residual_check(const CauchyProblem& problem, const TimePath& path, const SolverOptions& options) {
    return path_distance(path, duhamel_apply(problem, path), problem.T, options);
}

double mean_drift(const CauchyProblem& problem, const TimePath& path) {
    const auto linear = linear_evolution(problem);
    if (path.size() != linear.size()) throw DomainError("path must hold t_steps + 1 slices");
    auto mean = [](const SpectralField& u) {
        Complex sum = 0.0;
        for (const auto& v : u.values()) sum += v;
        return sum.real() / static_cast<double>(u.size());
    };
    double worst = 0.0;
    for (std::size_t k = 0; k < path.size(); ++k) worst = std::max(worst, std::abs(mean(path[k]) - mean(linear[k])));
    return worst;
}

}  // namespace caloric
