#include "amoc/empirical.hpp"

#include <algorithm>
#include <cmath>

#include "amoc/error.hpp"
#include "amoc/rng.hpp"

namespace amoc {

double quantile_sorted(std::span<const double> sorted, double prob) {
    if (sorted.empty()) {
        throw DomainError("quantile of an empty sample");
    }
    if (!(prob >= 0.0 && prob <= 1.0)) {
        throw DomainError("quantile probability must lie in [0,1]");
    }
    const double h = prob * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = h - static_cast<double>(lo);
    if (frac == 0.0) {
        return sorted[lo];
    }
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::vector<double> quantiles(std::vector<double> values, std::span<const double> probs) {
    std::sort(values.begin(), values.end());
    std::vector<double> out;
    out.reserve(probs.size());
    for (double p : probs) {
        out.push_back(quantile_sorted(values, p));
    }
    return out;
}

double ks_distance_sorted(std::span<const double> sorted, const std::function<double(double)>& cdf) {
    const double m = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = cdf(sorted[i]);
        d = std::max({d, static_cast<double>(i + 1) / m - f, f - static_cast<double>(i) / m});
    }
    return d;
}

double MeanVar::standard_error() const {
    return count > 0 ? std::sqrt(variance / static_cast<double>(count)) : 0.0;
}

MeanVar mean_var(std::span<const double> values) {
    MeanVar r;
    double m2 = 0.0;
    for (double x : values) {
        ++r.count;
        const double delta = x - r.mean;
        r.mean += delta / static_cast<double>(r.count);
        m2 += delta * (x - r.mean);
    }
    r.variance = r.count > 1 ? m2 / static_cast<double>(r.count - 1) : 0.0;
    return r;
}

double pearson_correlation(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw DomainError("correlation needs two equally long samples of size >= 2");
    }
    const MeanVar mx = mean_var(x);
    const MeanVar my = mean_var(y);
    double cov = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        cov += (x[i] - mx.mean) * (y[i] - my.mean);
    }
    cov /= static_cast<double>(x.size() - 1);
    return cov / std::sqrt(mx.variance * my.variance);
}

double bootstrap_quantile_se(std::span<const double> values, double prob, std::size_t resamples, std::uint64_t seed) {
    if (values.empty() || resamples < 2) {
        throw DomainError("bootstrap needs a non-empty sample and at least two resamples");
    }
    const std::size_t m = values.size();
    std::vector<double> draws(resamples);
    std::vector<double> buf(m);
    for (std::size_t b = 0; b < resamples; ++b) {
        Philox4x32 rng(seed, b);
        for (auto& v : buf) {
            const auto idx = static_cast<std::size_t>(rng.uniform() * static_cast<double>(m));
            v = values[std::min(idx, m - 1)];
        }
        std::sort(buf.begin(), buf.end());
        draws[b] = quantile_sorted(buf, prob);
    }
    return std::sqrt(mean_var(draws).variance);
}

} // namespace amoc
