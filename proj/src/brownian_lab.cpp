#include "amoc/brownian_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <omp.h>

#include "amoc/empirical.hpp"
#include "amoc/error.hpp"

namespace amoc {

std::vector<double> make_grid(const BridgeGrid& spec) {
    if (spec.uniform_intervals < 2) {
        throw DomainError("bridge grid needs at least two uniform intervals");
    }
    std::vector<double> grid;
    const std::size_t u = spec.uniform_intervals;
    grid.reserve(u + 1);
    for (std::size_t i = 0; i <= u; ++i) {
        grid.push_back(static_cast<double>(i) / static_cast<double>(u));
    }
    if (spec.refine_per_octave > 0 && spec.min_t > 0.0 && spec.min_t < 0.5) {
        const double r = static_cast<double>(spec.refine_per_octave);
        for (std::size_t j = spec.refine_per_octave;; ++j) {
            const double t = std::exp2(-static_cast<double>(j) / r);
            if (t < spec.min_t) {
                break;
            }
            grid.push_back(t);
            grid.push_back(1.0 - t);
        }
        grid.push_back(spec.min_t);
        grid.push_back(1.0 - spec.min_t);
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

BridgePath simulate_bridge(std::span<const double> grid, Philox4x32& rng) {
    if (grid.size() < 2 || grid.front() != 0.0 || grid.back() != 1.0) {
        throw DomainError("bridge grid must run from 0 to 1");
    }
    BridgePath path;
    path.grid.assign(grid.begin(), grid.end());
    path.values.resize(grid.size());
    double w = 0.0;
    path.values[0] = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double dt = grid[i] - grid[i - 1];
        if (!(dt > 0.0)) {
            throw DomainError("bridge grid must increase strictly");
        }
        w += std::sqrt(dt) * rng.normal();
        path.values[i] = w;
    }
    const double w1 = w;
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
        path.values[i] -= grid[i] * w1;
    }
    path.values.back() = 0.0;
    return path;
}

BridgePath simulate_bridge(std::size_t grid_size, std::size_t refine_factor, std::uint64_t seed) {
    BridgeGrid spec;
    spec.uniform_intervals = grid_size;
    spec.refine_per_octave = refine_factor;
    spec.min_t = 1.0 / (static_cast<double>(grid_size) * static_cast<double>(std::max<std::size_t>(1, refine_factor)));
    const auto grid = make_grid(spec);
    Philox4x32 rng(seed, 0);
    return simulate_bridge(grid, rng);
}

double weighted_sup_functional(const BridgePath& path) {
    double best = 0.0;
    for (std::size_t i = 1; i + 1 < path.grid.size(); ++i) {
        best = std::max(best, std::fabs(path.values[i]) / q_weight(path.grid[i]));
    }
    return best;
}

double de_sup_functional(const BridgePath& path, double horizon, Sides sides) {
    if (!(horizon >= 10.0)) {
        throw DomainError("de_sup_functional: horizon must be >= 10");
    }
    const double lo = 1.0 / horizon;
    const double hi = 1.0 - lo;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < path.grid.size(); ++i) {
        const double t = path.grid[i];
        if (t < lo || t > hi) {
            continue;
        }
        const double b = sides == Sides::two ? std::fabs(path.values[i]) : path.values[i];
        best = std::max(best, b / std::sqrt(t * (1.0 - t)));
    }
    return best;
}

std::string_view to_string(Functional f) noexcept {
    return f == Functional::darling_erdos ? "darling_erdos" : "weighted_sup_q";
}

Functional parse_functional(std::string_view name) {
    if (name == "weighted_sup_q") return Functional::weighted_sup_q;
    if (name == "darling_erdos") return Functional::darling_erdos;
    throw UsageError("unknown functional '" + std::string(name) + "' (expected weighted_sup_q|darling_erdos)");
}

std::vector<double> limit_draws(const LimitConfig& config, int threads) {
    if (config.functional == Functional::darling_erdos && !(config.horizon >= 10.0)) {
        throw DomainError("the Darling-Erdos functional needs horizon >= 10");
    }
    if (!(config.horizon > 2.0)) {
        throw DomainError("horizon must exceed 2");
    }
    BridgeGrid spec;
    spec.uniform_intervals = config.grid_size;
    spec.refine_per_octave = config.refine;
    spec.min_t = 1.0 / config.horizon;
    const std::vector<double> grid = make_grid(spec);

    const auto reps = static_cast<std::int64_t>(config.reps);
    std::vector<double> out(config.reps);
    const int workers = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(workers)
    for (std::int64_t r = 0; r < reps; ++r) {
        Philox4x32 rng(config.seed, static_cast<std::uint64_t>(r));
        const BridgePath path = simulate_bridge(grid, rng);
        out[static_cast<std::size_t>(r)] = config.functional == Functional::darling_erdos
                                               ? de_sup_functional(path, config.horizon, config.sides)
                                               : weighted_sup_functional(path);
    }
    return out;
}

LimitQuantiles limit_quantiles(const LimitConfig& config, std::span<const double> probs, int threads) {
    if (config.reps < 100) {
        throw DomainError("limit_quantiles needs at least 100 replications");
    }
    LimitQuantiles q;
    q.config = config;
    q.probs.assign(probs.begin(), probs.end());
    q.values = quantiles(limit_draws(config, threads), probs);
    return q;
}

} // namespace amoc
