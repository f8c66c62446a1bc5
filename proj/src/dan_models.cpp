#include "amoc/dan_models.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "amoc/error.hpp"
#include "amoc/limit_theory.hpp"

namespace amoc {
namespace {

template <class... Fs>
struct Overloaded : Fs... {
    using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

std::string shortest(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

double parse_number(std::string_view text, std::string_view model_text) {
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw UsageError("cannot parse parameter '" + std::string(text) + "' in model '" + std::string(model_text) +
                         "'; expected " + std::string(kModelGrammar));
    }
    return value;
}

std::vector<double> parse_params(std::string_view params, std::string_view model_text) {
    std::vector<double> out;
    while (!params.empty()) {
        const auto comma = params.find(',');
        out.push_back(parse_number(params.substr(0, comma), model_text));
        if (comma == std::string_view::npos) {
            break;
        }
        params.remove_prefix(comma + 1);
    }
    return out;
}

// Marsaglia-Tsang for shape >= 1, boosted by U^{1/shape} below 1.
double gamma_draw(double shape, Philox4x32& rng) {
    if (shape < 1.0) {
        return gamma_draw(shape + 1.0, rng) * std::pow(rng.uniform(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double z, v;
        do {
            z = rng.normal();
            v = 1.0 + c * z;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform();
        if (std::log(u) < 0.5 * z * z + d - d * v + d * std::log(v)) {
            return d * v;
        }
    }
}

double random_sign(Philox4x32& rng) { return (rng.next_u32() & 1u) ? -1.0 : 1.0; }

double normal_l(const NormalLaw& m, double x) {
    const double z = x / m.sd;
    if (z > 40.0) {
        return m.sd * m.sd;
    }
    const double phi = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
    return m.sd * m.sd * (std::erf(z / std::numbers::sqrt2) - 2.0 * z * phi);
}

// E T^2 1{|T| <= x} = nu [ (nu-1)/(nu-2) P(|T_{nu-2}| <= x sqrt((nu-2)/nu)) - P(|T_nu| <= x) ],
// from u^2 (1+u^2/nu)^{-(nu+1)/2} = nu [(1+u^2/nu)^{-(nu-1)/2} - (1+u^2/nu)^{-(nu+1)/2}].
double student_l(const StudentLaw& m, double x) {
    const double nu = m.df;
    if (!std::isfinite(x)) {
        return nu / (nu - 2.0);
    }
    const boost::math::students_t_distribution<double> t_nu(nu);
    const boost::math::students_t_distribution<double> t_lo(nu - 2.0);
    const double inner_lo = 1.0 - 2.0 * boost::math::cdf(boost::math::complement(t_lo, x * std::sqrt((nu - 2.0) / nu)));
    const double inner_nu = 1.0 - 2.0 * boost::math::cdf(boost::math::complement(t_nu, x));
    return std::max(0.0, nu * ((nu - 1.0) / (nu - 2.0) * inner_lo - inner_nu));
}

// l for the laws whose truncated moment is a function of log x, so that
// l(x^2) can be taken at 2 log x without forming x^2.
double pareto2_l_at_log(double log_x) { return log_x > 0.0 ? 2.0 * log_x : 0.0; }

double logpow_l_at_log(const LogPowLaw& m, double log_x) {
    if (log_x <= 1.0) {
        return 0.0;
    }
    return 2.0 * logpow_constant(m.alpha) / m.alpha * (std::pow(log_x, m.alpha) - 1.0);
}

double l_at_square(const TailModel& model, double x) {
    return std::visit(Overloaded{
                          [&](const NormalLaw& m) { return normal_l(m, x * x); },
                          [&](const StudentLaw& m) { return student_l(m, x * x); },
                          [&](const Pareto2Law&) { return pareto2_l_at_log(2.0 * std::log(x)); },
                          [&](const LogPowLaw& m) { return logpow_l_at_log(m, 2.0 * std::log(x)); },
                      },
                      model);
}

} // namespace

TailModel parse_model(std::string_view text) {
    const auto colon = text.find(':');
    const std::string_view name = text.substr(0, colon);
    const std::vector<double> p =
        colon == std::string_view::npos ? std::vector<double>{} : parse_params(text.substr(colon + 1), text);

    const auto expect = [&](std::size_t count) {
        if (p.size() != count) {
            throw UsageError("model '" + std::string(text) + "' takes " + std::to_string(count) +
                             " parameter(s); expected " + std::string(kModelGrammar));
        }
    };
    TailModel model;
    if (name == "normal" && p.empty()) {
        model = NormalLaw{};
    } else if (name == "normal") {
        expect(2);
        model = NormalLaw{p[0], p[1]};
    } else if (name == "student") {
        expect(1);
        model = StudentLaw{p[0]};
    } else if (name == "pareto2") {
        expect(0);
        model = Pareto2Law{};
    } else if (name == "logpow") {
        expect(1);
        model = LogPowLaw{p[0]};
    } else {
        throw UsageError("unknown model '" + std::string(text) + "'; expected " + std::string(kModelGrammar));
    }
    validate(model);
    return model;
}

std::string describe(const TailModel& model) {
    return std::visit(Overloaded{
                          [](const NormalLaw& m) { return "normal:" + shortest(m.mean) + "," + shortest(m.sd); },
                          [](const StudentLaw& m) { return "student:" + shortest(m.df); },
                          [](const Pareto2Law&) { return std::string("pareto2"); },
                          [](const LogPowLaw& m) { return "logpow:" + shortest(m.alpha); },
                      },
                      model);
}

void validate(const TailModel& model) {
    std::visit(Overloaded{
                   [](const NormalLaw& m) {
                       if (!std::isfinite(m.mean) || !(m.sd > 0.0) || !std::isfinite(m.sd)) {
                           throw ModelError("normal needs a finite mean and a positive finite sd");
                       }
                   },
                   [](const StudentLaw& m) {
                       if (!(m.df > 2.0) || !std::isfinite(m.df)) {
                           throw ModelError("student needs df > 2");
                       }
                   },
                   [](const Pareto2Law&) {},
                   [](const LogPowLaw& m) {
                       if (!(m.alpha > 0.0) || !std::isfinite(m.alpha)) {
                           throw ModelError("logpow needs alpha > 0");
                       }
                   },
               },
               model);
}

double logpow_constant(double alpha) {
    // 2c int_e^inf (log u)^{alpha-1} u^{-3} du = 2c 2^{-alpha} Gamma(alpha, 2) = 1.
    return std::pow(2.0, alpha - 1.0) / boost::math::tgamma(alpha, 2.0);
}

double positivity_floor(const TailModel& model) {
    return std::holds_alternative<LogPowLaw>(model) ? std::numbers::e : 1.0;
}

void draw(const TailModel& model, Philox4x32& rng, std::span<double> out) {
    validate(model);
    std::visit(Overloaded{
                   [&](const NormalLaw& m) {
                       for (auto& x : out) x = m.mean + m.sd * rng.normal();
                   },
                   [&](const StudentLaw& m) {
                       for (auto& x : out) {
                           const double z = rng.normal();
                           const double chi2 = 2.0 * gamma_draw(0.5 * m.df, rng);
                           x = z / std::sqrt(chi2 / m.df);
                       }
                   },
                   [&](const Pareto2Law&) {
                       for (auto& x : out) x = random_sign(rng) / std::sqrt(rng.uniform());
                   },
                   [&](const LogPowLaw& m) {
                       // log|X| = V has density proportional to v^{alpha-1} e^{-2v} on v >= 1,
                       // i.e. a Gamma(alpha, rate 2) conditioned on 2V >= 2.
                       const double tail = boost::math::gamma_q(m.alpha, 2.0);
                       for (auto& x : out) {
                           const double v = 0.5 * boost::math::gamma_q_inv(m.alpha, rng.uniform() * tail);
                           x = random_sign(rng) * std::exp(v);
                       }
                   },
               },
               model);
}

Sample sample(const TailModel& model, std::size_t n, std::uint64_t seed) {
    if (n == 0) {
        throw ModelError("sample size must be at least 1");
    }
    std::vector<double> values(n);
    Philox4x32 rng(seed, 0);
    draw(model, rng, values);
    return Sample(std::move(values), describe(model) + " seed=" + std::to_string(seed));
}

double truncated_second_moment(const TailModel& model, double x) {
    if (!(x > 0.0)) {
        throw DomainError("truncated_second_moment: x must be positive");
    }
    return std::visit(Overloaded{
                          [&](const NormalLaw& m) { return normal_l(m, x); },
                          [&](const StudentLaw& m) { return student_l(m, x); },
                          [&](const Pareto2Law&) { return pareto2_l_at_log(std::log(x)); },
                          [&](const LogPowLaw& m) { return logpow_l_at_log(m, std::log(x)); },
                      },
                      model);
}

double epsilon_diag(const TailModel& model, double x) {
    const double l = truncated_second_moment(model, x);
    if (!(l > 0.0)) {
        throw DomainError("epsilon_diag: l(x) = 0 at x = " + shortest(x));
    }
    // x l'(x), where l'(x) is the density of |X - mu| times x^2.
    const double x_lprime = std::visit(
        Overloaded{
            [&](const NormalLaw& m) {
                const double z = x / m.sd;
                return 2.0 * x * x * x * std::exp(-0.5 * z * z) / (m.sd * std::sqrt(2.0 * std::numbers::pi));
            },
            [&](const StudentLaw& m) {
                return 2.0 * x * x * x * boost::math::pdf(boost::math::students_t_distribution<double>(m.df), x);
            },
            [&](const Pareto2Law&) { return 2.0; },
            [&](const LogPowLaw& m) { return 2.0 * logpow_constant(m.alpha) * std::pow(std::log(x), m.alpha - 1.0); },
        },
        model);
    return x_lprime / l;
}

double lfun_ratio(const TailModel& model, double x) {
    const double l = truncated_second_moment(model, x);
    if (!(l > 0.0)) {
        throw DomainError("lfun_ratio: l(x) = 0 at x = " + shortest(x));
    }
    return l_at_square(model, x) / l;
}

double eta_n(const TailModel& model, double n) {
    if (!(n >= 2.0)) {
        throw DomainError("eta_n: n must be >= 2");
    }
    const double ll = guarded_log(guarded_log(n));
    const double target = ll * ll * ll * ll / n;
    const auto excess = [&](double s) { return truncated_second_moment(model, s) / (s * s) - target; };

    double lo = positivity_floor(model) + 1.0;
    double hi = n * n;
    if (excess(lo) <= 0.0) {
        return lo;
    }
    if (!(hi > lo) || excess(hi) > 0.0) {
        throw NumericalError("eta_n: l(s)/s^2 does not fall below (LL n)^4/n on [b+1, n^2]");
    }
    for (int it = 0; it < 400 && hi - lo > 1e-9 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (excess(mid) <= 0.0 ? hi : lo) = mid;
    }
    return hi;
}

SlowVarDiag slow_var_diag(const TailModel& model, double x) {
    SlowVarDiag d;
    d.x = x;
    d.l_of_x = truncated_second_moment(model, x);
    if (d.l_of_x > 0.0) {
        d.eps_of_x = epsilon_diag(model, x);
        d.ratio_l_x2_over_l_x = lfun_ratio(model, x);
    } else {
        d.eps_of_x = std::numeric_limits<double>::quiet_NaN();
        d.ratio_l_x2_over_l_x = std::numeric_limits<double>::quiet_NaN();
    }
    return d;
}

} // namespace amoc
