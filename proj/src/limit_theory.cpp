#include "amoc/limit_theory.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "amoc/error.hpp"

namespace amoc {
namespace {

double multiplicity(Sides law) noexcept { return law == Sides::two ? 2.0 : 1.0; }

} // namespace

double guarded_log(double x) noexcept {
    return x > std::numbers::e ? std::log(x) : 1.0;
}

NormConstants norm_constants(double n) {
    if (!(n >= 1.0)) {
        throw DomainError("norm_constants: n must be >= 1");
    }
    const double ll = guarded_log(guarded_log(n));
    NormConstants c;
    c.n = n;
    c.a_n = std::sqrt(2.0 * ll);
    c.b_n = 2.0 * ll + 0.5 * guarded_log(ll) - 0.5 * std::log(std::numbers::pi);
    return c;
}

double gumbel_cdf(Sides law, double t) noexcept {
    return std::exp(-multiplicity(law) * std::exp(-t));
}

double gumbel_pvalue(Sides law, double normalized_stat) noexcept {
    if (normalized_stat == INFINITY) {
        return 0.0;
    }
    if (normalized_stat == -INFINITY) {
        return 1.0;
    }
    return -std::expm1(-multiplicity(law) * std::exp(-normalized_stat));
}

double gumbel_critical(Sides law, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw DomainError("gumbel_critical: alpha must lie in (0,1), got " + std::to_string(alpha));
    }
    return -std::log(-std::log1p(-alpha) / multiplicity(law));
}

double q_weight(double t) {
    if (!(t > 0.0 && t < 1.0)) {
        throw DomainError("q_weight: t must lie in (0,1)");
    }
    const double u = t <= 0.5 ? t : 1.0 - t;
    return std::sqrt(u * guarded_log(guarded_log(1.0 / u)));
}

} // namespace amoc
