#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "amoc/limit_theory.hpp"
#include "amoc/prefix_sums.hpp"

namespace amoc {

/// Which change-in-mean statistic a scan evaluates.
///  - gamma:    the standardised mean difference Gamma_n(k), 1 <= k < n
///  - hat:      Gamma_n(k) divided by the pooled sigma-hat_{k,n}, 1 <= k < n
///  - tkn:      the two-sample self-normalised T_{k,n}, 2 <= k <= n-2
///  - weighted: the q-weighted sup-norm of the tied-down process
enum class StatKind { gamma, hat, tkn, weighted };

std::string_view to_string(StatKind kind) noexcept;
std::string_view to_string(Sides sides) noexcept;
/// Throws UsageError for an unknown name.
StatKind parse_stat_kind(std::string_view name);

struct ScanPoint {
    std::size_t k = 0;
    double value = 0.0;
};

/// Outcome of scanning every admissible change point.
///
/// `max_value` is the maximum of the signed values (one-sided) or of their
/// absolute values (two-sided), as recorded in `sides`. `p_one_sided` is
/// always derived from the signed maximum and `p_two_sided` from the absolute
/// maximum, so both are available whatever mode was requested.
struct ScanResult {
    StatKind stat_kind = StatKind::tkn;
    Sides sides = Sides::one;
    std::vector<ScanPoint> per_k;
    double max_value = 0.0;
    std::size_t argmax_k = 0;
    std::optional<double> normalized;
    std::optional<double> p_one_sided;
    std::optional<double> p_two_sided;
    /// Some k had a zero variance estimate with a non-zero mean difference.
    bool degenerate = false;
};

/// Gamma_n(k) = sqrt(k(n-k)/n) (S_k/k - (S_n-S_k)/(n-k)). Requires 1 <= k < n.
double gamma_nk(const PrefixSums& ps, std::size_t k);

/// max_{1<=k<n} |Gamma_n(k)|. No normalisation is attached: this statistic
/// diverges under the null.
ScanResult gamma_max(const PrefixSums& ps);

/// Pooled within-segment variance about the two segment means, divided by n.
/// k == n gives the full-sample variance (1/n) sum (X_i - Xbar)^2.
double sigma_hat_sq(const PrefixSums& ps, std::size_t k);

/// SS_1/(k(k-1)) + SS_2/((n-k)(n-k-1)) for 2 <= k <= n-2.
double sigma_tilde_sq(const PrefixSums& ps, std::size_t k);

/// Two-sample T statistic at k. A zero denominator yields 0 when the mean
/// difference is also zero and an infinity carrying the sign of the mean
/// difference otherwise.
double t_kn(const PrefixSums& ps, std::size_t k);

/// Tied-down partial-sum process Z_n(t) for t in [0,1].
double z_n(const PrefixSums& ps, double t);

/// Z_n evaluated at an integer index j = floor((n+1)t), 0 <= j <= n.
double z_at_index(const PrefixSums& ps, std::size_t j) noexcept;

/// floor((n+1) t), snapping products that land within a few ulps of an
/// integer onto it so that t = k/(n+1) maps back to k.
std::size_t tied_down_index(std::size_t n, double t) noexcept;

/// T_{k,n} over 2 <= k <= n-2 with Darling-Erdos normalisation and Gumbel
/// p-values. Throws DegenerateData on constant data and InvalidData if n < 4.
ScanResult scan_tkn(const PrefixSums& ps, Sides sides);

/// Gamma_n(k)/sigma-hat_{k,n} over 1 <= k < n, normalised as scan_tkn.
ScanResult scan_hat(const PrefixSums& ps, Sides sides = Sides::one);

struct WeightedSup {
    double value = 0.0;
    /// Left end of the piece of (0,1) on which the supremum is reached.
    double t = 0.0;
    /// floor((n+1)t) on that piece.
    std::size_t k = 0;
};

/// sup_{0<t<1} |Z_n(t)| / (sigma-hat_{m(t),n} q(t)) with m(t) = min(n, floor(nt)+1),
/// evaluated exactly on the pieces where both step indices are constant.
WeightedSup weighted_supnorm_detail(const PrefixSums& ps);

inline double weighted_supnorm(const PrefixSums& ps) { return weighted_supnorm_detail(ps).value; }

} // namespace amoc
