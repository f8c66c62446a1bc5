#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "amoc/limit_theory.hpp"
#include "amoc/rng.hpp"

namespace amoc {

/// Time grid for bridge paths: a uniform grid of `uniform_intervals` steps,
/// merged with geometric points 2^{-j/refine_per_octave} in [min_t, 1/2] and
/// their mirror images near 1. `min_t` and 1 - min_t are always grid points
/// when refinement is on.
struct BridgeGrid {
    std::size_t uniform_intervals = 4096;
    std::size_t refine_per_octave = 16;
    double min_t = 1e-8;
};

/// Strictly increasing times from 0 to 1 inclusive.
std::vector<double> make_grid(const BridgeGrid& spec);

/// A Brownian bridge sampled exactly at the grid points.
struct BridgePath {
    std::vector<double> grid;
    std::vector<double> values;
};

/// B(t) = W(t) - t W(1) with W built from independent Gaussian increments.
/// `grid` must start at 0, end at 1 and increase strictly.
BridgePath simulate_bridge(std::span<const double> grid, Philox4x32& rng);

/// Convenience form: uniform grid of `grid_size` steps with `refine_factor`
/// points per octave near each end, down to 1/(grid_size * refine_factor).
BridgePath simulate_bridge(std::size_t grid_size, std::size_t refine_factor, std::uint64_t seed);

/// max over interior grid points of |B(t)| / q(t).
double weighted_sup_functional(const BridgePath& path);

/// max over grid points in [1/T, 1 - 1/T] of B(t)/sqrt(t(1-t)), or of |B(t)|
/// for the two-sided form. After a(T) x - b(T) its law tends to the Gumbel
/// law matching `sides`. Throws DomainError for T < 10.
double de_sup_functional(const BridgePath& path, double horizon, Sides sides = Sides::one);

enum class Functional { weighted_sup_q, darling_erdos };

std::string_view to_string(Functional f) noexcept;
/// Throws UsageError for an unknown name.
Functional parse_functional(std::string_view name);

struct LimitConfig {
    Functional functional = Functional::weighted_sup_q;
    std::size_t reps = 1000;
    std::size_t grid_size = 4096;
    std::size_t refine = 16;
    /// T in sup over [1/T, 1-1/T]; also sets the refinement floor 1/T.
    double horizon = 1e8;
    Sides sides = Sides::one;
    std::uint64_t seed = 0;
};

/// One functional value per replication, in replication order. Replication r
/// draws from Philox stream (seed, r), so the output does not depend on
/// `threads` (0 means the OpenMP default).
std::vector<double> limit_draws(const LimitConfig& config, int threads = 0);

struct LimitQuantiles {
    LimitConfig config;
    std::vector<double> probs;
    std::vector<double> values;
};

/// Monte Carlo quantiles of the chosen functional. Requires reps >= 100.
LimitQuantiles limit_quantiles(const LimitConfig& config, std::span<const double> probs, int threads = 0);

} // namespace amoc
