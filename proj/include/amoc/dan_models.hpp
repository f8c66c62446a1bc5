#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>

#include "amoc/prefix_sums.hpp"
#include "amoc/rng.hpp"

namespace amoc {

// Laws in the domain of attraction of the normal law. All are symmetric about
// their location, so the truncated second moment centred at the mean is the
// one centred at the location parameter.

struct NormalLaw {
    double mean = 0.0;
    double sd = 1.0;
};

/// Student t with df > 2 degrees of freedom (finite variance).
struct StudentLaw {
    double df = 3.0;
};

/// Symmetric Pareto with P(|X| > x) = x^{-2} for x >= 1; infinite variance,
/// l(x) = 2 log x.
struct Pareto2Law {};

/// Symmetric law with density c (log|x|)^{alpha-1} / |x|^3 on |x| >= e;
/// l(x) grows like (log x)^alpha.
struct LogPowLaw {
    double alpha = 1.0;
};

using TailModel = std::variant<NormalLaw, StudentLaw, Pareto2Law, LogPowLaw>;

/// The grammar accepted by parse_model, for error messages.
inline constexpr std::string_view kModelGrammar = "normal[:MEAN,SD] | student:DF | pareto2 | logpow:ALPHA";

/// Parses `normal:0,1` (bare `normal` is the standard normal), `student:3`, `pareto2`, `logpow:0.5`.
/// Throws UsageError on malformed text and ModelError on invalid parameters.
TailModel parse_model(std::string_view text);

/// Inverse of parse_model, with parameters printed to round-trip.
std::string describe(const TailModel& model);

/// Throws ModelError if parameters are out of range.
void validate(const TailModel& model);

/// Density normalising constant c_alpha of LogPowLaw.
double logpow_constant(double alpha);

/// b = inf{x >= 1 : l(x) > 0}.
double positivity_floor(const TailModel& model);

/// Fills `out` with i.i.d. draws consuming `rng`.
void draw(const TailModel& model, Philox4x32& rng, std::span<double> out);

/// n i.i.d. draws from stream (seed, 0). Deterministic in (model, n, seed).
Sample sample(const TailModel& model, std::size_t n, std::uint64_t seed);

/// l(x) = E (X - mu)^2 1{|X - mu| <= x}.
double truncated_second_moment(const TailModel& model, double x);

/// epsilon(x) = x l'(x) / l(x). Throws DomainError where l(x) = 0.
double epsilon_diag(const TailModel& model, double x);

/// l(x^2) / l(x). Throws DomainError where l(x) = 0.
double lfun_ratio(const TailModel& model, double x);

/// inf{s >= b+1 : l(s)/s^2 <= (LL n)^4 / n} by bisection on [b+1, n^2].
/// Throws NumericalError if the bracket holds no crossing.
double eta_n(const TailModel& model, double n);

/// One diagnostic row for reports.
struct SlowVarDiag {
    double x = 0.0;
    double l_of_x = 0.0;
    double eps_of_x = 0.0;
    double ratio_l_x2_over_l_x = 0.0;
};

SlowVarDiag slow_var_diag(const TailModel& model, double x);

} // namespace amoc
