#pragma once

// Serial reference implementations recomputed from the raw observations with
// no prefix sums. Each statistic at k costs O(n), so a full scan is O(n^2).
// They are the oracles for the O(n) kernels and must stay independent of them.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace amoc::reference {

struct Segment {
    double mean = 0.0;
    double ss = 0.0;
};

// Two-pass mean and sum of squared deviations of values[begin, end).
inline Segment segment(std::span<const double> x, std::size_t begin, std::size_t end) {
    double sum = 0.0;
    for (std::size_t i = begin; i < end; ++i) sum += x[i];
    const double mean = sum / static_cast<double>(end - begin);
    double ss = 0.0;
    for (std::size_t i = begin; i < end; ++i) ss += (x[i] - mean) * (x[i] - mean);
    return {mean, ss};
}

inline double t_kn(std::span<const double> x, std::size_t k) {
    const std::size_t n = x.size();
    const auto a = segment(x, 0, k);
    const auto b = segment(x, k, n);
    const double kd = static_cast<double>(k), rd = static_cast<double>(n - k);
    const double var = a.ss / (kd * (kd - 1)) + b.ss / (rd * (rd - 1));
    const double num = a.mean - b.mean;
    if (var == 0.0) return num == 0.0 ? 0.0 : std::copysign(INFINITY, num);
    return num / std::sqrt(var);
}

inline double sigma_hat_sq(std::span<const double> x, std::size_t k) {
    const std::size_t n = x.size();
    if (k == n) return segment(x, 0, n).ss / static_cast<double>(n);
    return (segment(x, 0, k).ss + segment(x, k, n).ss) / static_cast<double>(n);
}

// Gamma_n(k)/sigma-hat_{k,n} written with the first (mean-difference) form.
inline double hat_term(std::span<const double> x, std::size_t k) {
    const std::size_t n = x.size();
    const auto a = segment(x, 0, k);
    const auto b = segment(x, k, n);
    const double kd = static_cast<double>(k), nd = static_cast<double>(n);
    const double gamma = std::sqrt(kd * (nd - kd) / nd) * (a.mean - b.mean);
    const double s2 = (a.ss + b.ss) / nd;
    if (s2 == 0.0) return gamma == 0.0 ? 0.0 : std::copysign(INFINITY, gamma);
    return gamma / std::sqrt(s2);
}

// Second algebraic form of Gamma_n(k): (S_k/sqrt(n) - (k/n) S_n/sqrt(n)) / sqrt((k/n)(1-k/n)).
inline double gamma_second_form(std::span<const double> x, std::size_t k) {
    const std::size_t n = x.size();
    double sk = 0.0, sn = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sn += x[i];
        if (i < k) sk += x[i];
    }
    const double nd = static_cast<double>(n), u = static_cast<double>(k) / nd;
    return (sk / std::sqrt(nd) - u * sn / std::sqrt(nd)) / std::sqrt(u * (1.0 - u));
}

inline std::vector<double> t_scan(std::span<const double> x) {
    std::vector<double> out;
    for (std::size_t k = 2; k + 2 <= x.size(); ++k) out.push_back(t_kn(x, k));
    return out;
}

inline std::vector<double> hat_scan(std::span<const double> x) {
    std::vector<double> out;
    for (std::size_t k = 1; k < x.size(); ++k) out.push_back(hat_term(x, k));
    return out;
}

// Z_n(t) straight from the definition with floor((n+1)t).
inline double z_direct(std::span<const double> x, double t) {
    const std::size_t n = x.size();
    if (t >= 1.0) return 0.0;
    const auto j = static_cast<std::size_t>(std::floor(static_cast<double>(n + 1) * t));
    double sj = 0.0, sn = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sn += x[i];
        if (i < j) sj += x[i];
    }
    return (sj - static_cast<double>(j) * sn / static_cast<double>(n)) / std::sqrt(static_cast<double>(n));
}

inline double q_direct(double t) {
    const auto lg = [](double v) { return std::log(std::max(std::exp(1.0), v)); };
    const double u = t <= 0.5 ? t : 1.0 - t;
    return std::sqrt(u * lg(lg(1.0 / u)));
}

// Integrand of the weighted sup-norm statistic at a single t.
inline double weighted_integrand(std::span<const double> x, double t) {
    const std::size_t n = x.size();
    const auto m = std::min<std::size_t>(n, static_cast<std::size_t>(std::floor(static_cast<double>(n) * t)) + 1);
    const double s = std::sqrt(sigma_hat_sq(x, m));
    return std::fabs(z_direct(x, t)) / (s * q_direct(t));
}

} // namespace amoc::reference
