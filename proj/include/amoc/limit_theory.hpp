#pragma once

#include <cstdint>

namespace amoc {

/// Whether a maximum is taken over signed values or absolute values.
/// Selects the Gumbel law exp(-e^{-t}) or exp(-2e^{-t}) respectively.
enum class Sides { one, two };

/// log(max(e, x)); always >= 1.
double guarded_log(double x) noexcept;

/// Darling-Erdos scaling a(n) and centring b(n).
struct NormConstants {
    double n = 0.0;
    double a_n = 0.0;
    double b_n = 0.0;
};

/// a(n) = sqrt(2 LL(n)), b(n) = 2 LL(n) + LLL(n)/2 - log(pi)/2 with every
/// logarithm guarded. Accepts non-integer horizons for the limit-process lab.
NormConstants norm_constants(double n);

double gumbel_cdf(Sides law, double t) noexcept;

/// Upper tail 1 - cdf, evaluated without cancellation. +inf maps to 0 and
/// -inf to 1.
double gumbel_pvalue(Sides law, double normalized_stat) noexcept;

/// The t with gumbel_pvalue(law, t) == alpha. Throws DomainError unless
/// 0 < alpha < 1.
double gumbel_critical(Sides law, double alpha);

/// Iterated-log weight q(t) for the weighted sup-norm statistic, t in (0,1).
double q_weight(double t);

} // namespace amoc
