#include "amoc/core_stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "amoc/error.hpp"

namespace amoc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double ratio_or_sentinel(double num, double den_sq) noexcept {
    if (den_sq > 0.0) {
        return num / std::sqrt(den_sq);
    }
    return num == 0.0 ? 0.0 : std::copysign(kInf, num);
}

void check_k(const PrefixSums& ps, std::size_t k, std::size_t lo, std::size_t hi, const char* what) {
    if (k < lo || k > hi) {
        throw IndexError(std::string(what) + ": k=" + std::to_string(k) + " outside [" + std::to_string(lo) +
                         ", " + std::to_string(hi) + "] for n=" + std::to_string(ps.n()));
    }
}

// Fills max/argmax/p-values from per_k. The signed maximum drives the
// one-sided law, the absolute maximum the two-sided one.
void summarise(ScanResult& r, std::size_t n, bool normalise) {
    double best_signed = -kInf;
    double best_abs = -kInf;
    std::size_t k_signed = 0;
    std::size_t k_abs = 0;
    for (const auto& p : r.per_k) {
        if (p.value > best_signed) {
            best_signed = p.value;
            k_signed = p.k;
        }
        const double a = std::fabs(p.value);
        if (a > best_abs) {
            best_abs = a;
            k_abs = p.k;
        }
        if (std::isinf(p.value)) {
            r.degenerate = true;
        }
    }
    if (r.sides == Sides::one) {
        r.max_value = best_signed;
        r.argmax_k = k_signed;
    } else {
        r.max_value = best_abs;
        r.argmax_k = k_abs;
    }
    if (!normalise) {
        return;
    }
    const NormConstants c = norm_constants(static_cast<double>(n));
    const auto normalise_value = [&](double m) { return std::isinf(m) ? m : c.a_n * m - c.b_n; };
    r.normalized = normalise_value(r.max_value);
    r.p_one_sided = gumbel_pvalue(Sides::one, normalise_value(best_signed));
    r.p_two_sided = gumbel_pvalue(Sides::two, normalise_value(best_abs));
}

} // namespace

std::string_view to_string(StatKind kind) noexcept {
    switch (kind) {
    case StatKind::gamma: return "gamma";
    case StatKind::hat: return "hat";
    case StatKind::tkn: return "tkn";
    case StatKind::weighted: return "weighted";
    }
    return "unknown";
}

std::string_view to_string(Sides sides) noexcept {
    return sides == Sides::two ? "two" : "one";
}

StatKind parse_stat_kind(std::string_view name) {
    if (name == "gamma") return StatKind::gamma;
    if (name == "hat") return StatKind::hat;
    if (name == "tkn") return StatKind::tkn;
    if (name == "weighted") return StatKind::weighted;
    throw UsageError("unknown statistic '" + std::string(name) + "' (expected tkn|hat|gamma|weighted)");
}

double gamma_nk(const PrefixSums& ps, std::size_t k) {
    const std::size_t n = ps.n();
    check_k(ps, k, 1, n - 1, "gamma_nk");
    const double kd = static_cast<double>(k);
    const double nd = static_cast<double>(n);
    const double diff = ps.segment_centred_mean(0, k) - ps.segment_centred_mean(k, n);
    return std::sqrt(kd * (nd - kd) / nd) * diff;
}

ScanResult gamma_max(const PrefixSums& ps) {
    const std::size_t n = ps.n();
    if (n < 2) {
        throw InvalidData("gamma_max needs n >= 2");
    }
    ScanResult r;
    r.stat_kind = StatKind::gamma;
    r.sides = Sides::two;
    r.per_k.reserve(n - 1);
    for (std::size_t k = 1; k < n; ++k) {
        r.per_k.push_back({k, gamma_nk(ps, k)});
    }
    summarise(r, n, false);
    return r;
}

double sigma_hat_sq(const PrefixSums& ps, std::size_t k) {
    const std::size_t n = ps.n();
    check_k(ps, k, 1, n, "sigma_hat_sq");
    const double nd = static_cast<double>(n);
    if (k == n) {
        return ps.segment_ss(0, n) / nd;
    }
    return (ps.segment_ss(0, k) + ps.segment_ss(k, n)) / nd;
}

double sigma_tilde_sq(const PrefixSums& ps, std::size_t k) {
    const std::size_t n = ps.n();
    if (n < 4) {
        throw IndexError("sigma_tilde_sq needs n >= 4");
    }
    check_k(ps, k, 2, n - 2, "sigma_tilde_sq");
    const double kd = static_cast<double>(k);
    const double rd = static_cast<double>(n - k);
    return ps.segment_ss(0, k) / (kd * (kd - 1.0)) + ps.segment_ss(k, n) / (rd * (rd - 1.0));
}

double t_kn(const PrefixSums& ps, std::size_t k) {
    const double den_sq = sigma_tilde_sq(ps, k);
    const double num = ps.segment_centred_mean(0, k) - ps.segment_centred_mean(k, ps.n());
    return ratio_or_sentinel(num, den_sq);
}

std::size_t tied_down_index(std::size_t n, double t) noexcept {
    const double x = static_cast<double>(n + 1) * t;
    const double r = std::nearbyint(x);
    double j = std::floor(x);
    if (std::fabs(x - r) <= 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(x))) {
        j = r;
    }
    if (j <= 0.0) {
        return 0;
    }
    return std::min(n, static_cast<std::size_t>(j));
}

double z_at_index(const PrefixSums& ps, std::size_t j) noexcept {
    const std::size_t n = ps.n();
    if (j == 0 || j >= n) {
        return 0.0;
    }
    const double nd = static_cast<double>(n);
    const double jd = static_cast<double>(j);
    return (ps.centred_sum(j) - jd * ps.centred_sum(n) / nd) / std::sqrt(nd);
}

double z_n(const PrefixSums& ps, double t) {
    if (!(t >= 0.0 && t <= 1.0)) {
        throw DomainError("z_n: t must lie in [0,1]");
    }
    if (t == 1.0) {
        return 0.0;
    }
    return z_at_index(ps, tied_down_index(ps.n(), t));
}

ScanResult scan_tkn(const PrefixSums& ps, Sides sides) {
    const std::size_t n = ps.n();
    if (n < 4) {
        throw InvalidData("the T scan needs n >= 4, got n=" + std::to_string(n));
    }
    if (ps.constant()) {
        throw DegenerateData("all observations are equal; T is undefined");
    }
    ScanResult r;
    r.stat_kind = StatKind::tkn;
    r.sides = sides;
    r.per_k.reserve(n - 3);
    for (std::size_t k = 2; k + 2 <= n; ++k) {
        r.per_k.push_back({k, t_kn(ps, k)});
    }
    summarise(r, n, true);
    return r;
}

ScanResult scan_hat(const PrefixSums& ps, Sides sides) {
    const std::size_t n = ps.n();
    if (n < 2) {
        throw InvalidData("the sigma-hat scan needs n >= 2");
    }
    if (ps.constant()) {
        throw DegenerateData("all observations are equal; sigma-hat is zero everywhere");
    }
    const double nd = static_cast<double>(n);
    ScanResult r;
    r.stat_kind = StatKind::hat;
    r.sides = sides;
    r.per_k.reserve(n - 1);
    for (std::size_t k = 1; k < n; ++k) {
        const double kd = static_cast<double>(k);
        const double num = std::sqrt(nd * nd / (kd * (nd - kd))) * z_at_index(ps, k);
        r.per_k.push_back({k, ratio_or_sentinel(num, sigma_hat_sq(ps, k))});
    }
    summarise(r, n, true);
    return r;
}

WeightedSup weighted_supnorm_detail(const PrefixSums& ps) {
    const std::size_t n = ps.n();
    if (n < 2) {
        throw InvalidData("the weighted sup-norm needs n >= 2");
    }
    if (ps.constant()) {
        throw DegenerateData("all observations are equal; sigma-hat is zero everywhere");
    }
    // Walk the merged breakpoints j/(n+1) and i/n in exact integer order.
    // On [t_a, t_b) both floor((n+1)t) = j and floor(nt) = i are constant,
    // and since q rises on (0,1/2] and falls on [1/2,1) its infimum over the
    // piece sits at one of the two ends.
    const std::uint64_t np1 = n + 1;
    std::uint64_t j = 0;
    std::uint64_t i = 0;
    double t_a = 0.0;
    WeightedSup best;
    while (j < n) {
        const std::uint64_t next_j = (j + 1) * n;
        const std::uint64_t next_i = (i + 1) * np1;
        const bool step_j = next_j <= next_i;
        const bool step_i = next_i <= next_j;
        const double t_b = step_j ? static_cast<double>(j + 1) / static_cast<double>(np1)
                                  : static_cast<double>(i + 1) / static_cast<double>(n);
        if (j >= 1) {
            const double z = std::fabs(z_at_index(ps, j));
            const std::size_t m = std::min<std::size_t>(n, i + 1);
            const double q_inf = std::min(q_weight(t_a), q_weight(t_b));
            const double value = ratio_or_sentinel(z / q_inf, sigma_hat_sq(ps, m));
            if (value > best.value) {
                best = {value, t_a, static_cast<std::size_t>(j)};
            }
        }
        if (step_j) ++j;
        if (step_i) ++i;
        t_a = t_b;
    }
    return best;
}

} // namespace amoc
