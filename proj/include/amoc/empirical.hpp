#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace amoc {

/// Linear-interpolation quantile (Hyndman-Fan type 7) of an ascending sample.
double quantile_sorted(std::span<const double> sorted, double prob);

/// Quantiles of an unsorted sample at each probability; throws DomainError
/// for probabilities outside [0,1] or an empty sample.
std::vector<double> quantiles(std::vector<double> values, std::span<const double> probs);

/// One-sample Kolmogorov-Smirnov distance sup_x |F_m(x) - F(x)| of an
/// ascending sample against a continuous CDF.
double ks_distance_sorted(std::span<const double> sorted, const std::function<double(double)>& cdf);

struct MeanVar {
    std::size_t count = 0;
    double mean = 0.0;
    /// Unbiased sample variance.
    double variance = 0.0;

    double standard_error() const;
};

/// Welford accumulation.
MeanVar mean_var(std::span<const double> values);

double pearson_correlation(std::span<const double> x, std::span<const double> y);

/// Bootstrap standard error of the type-7 quantile at `prob`.
double bootstrap_quantile_se(std::span<const double> values, double prob, std::size_t resamples, std::uint64_t seed);

} // namespace amoc
