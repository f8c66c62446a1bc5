#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace amoc {

/// An ordered series of finite observations X_1..X_n.
class Sample {
public:
    Sample() = default;

    /// Throws InvalidData if any value is NaN or infinite.
    explicit Sample(std::vector<double> values, std::string provenance = {});

    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }
    double operator[](std::size_t i) const { return values_[i]; }
    const std::string& provenance() const noexcept { return provenance_; }

private:
    std::vector<double> values_;
    std::string provenance_;
};

/// Cumulative sums S_0..S_n and cumulative squares V_0..V_n of a sample.
///
/// The raw sequences are what `s()` and `v()` return. Segment statistics are
/// evaluated from a second pair of sequences accumulated about the sample
/// mean, so that V_k - S_k^2/k does not cancel catastrophically when the data
/// sit far from zero. Both pairs use Neumaier-compensated accumulation.
class PrefixSums {
public:
    /// Throws InvalidData for an empty sample.
    explicit PrefixSums(const Sample& sample);
    explicit PrefixSums(std::span<const double> values);

    std::size_t n() const noexcept { return n_; }

    std::span<const double> s() const noexcept { return s_; }
    std::span<const double> v() const noexcept { return v_; }

    /// Centred partial sum sum_{i<=k}(X_i - c) where c is the sample mean.
    double centred_sum(std::size_t k) const noexcept { return cs_[k]; }
    /// Centred partial sum of squares sum_{i<=k}(X_i - c)^2.
    double centred_sumsq(std::size_t k) const noexcept { return cv_[k]; }
    double centre() const noexcept { return centre_; }

    /// Sum of squared deviations of X_{begin+1..end} about their own mean,
    /// clamped at zero. Requires begin < end <= n.
    double segment_ss(std::size_t begin, std::size_t end) const noexcept;

    /// Same quantity before the clamp; used to audit rounding.
    double segment_ss_unclamped(std::size_t begin, std::size_t end) const noexcept;

    /// Mean of X_{begin+1..end} minus the sample mean.
    double segment_centred_mean(std::size_t begin, std::size_t end) const noexcept;

    /// True when every observation has the same value.
    bool constant() const noexcept { return constant_; }

private:
    void build(std::span<const double> values);

    std::size_t n_ = 0;
    double centre_ = 0.0;
    bool constant_ = false;
    std::vector<double> s_;
    std::vector<double> v_;
    std::vector<double> cs_;
    std::vector<double> cv_;
};

inline PrefixSums prefix_sums(const Sample& sample) { return PrefixSums(sample); }

} // namespace amoc
