#include "amoc/prefix_sums.hpp"

#include <algorithm>
#include <cmath>

#include "amoc/error.hpp"

namespace amoc {
namespace {

// Neumaier's variant of Kahan summation; `value()` is the running total.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }

    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

} // namespace

Sample::Sample(std::vector<double> values, std::string provenance)
    : values_(std::move(values)), provenance_(std::move(provenance)) {
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw InvalidData("observation " + std::to_string(i + 1) + " is not finite");
        }
    }
}

PrefixSums::PrefixSums(const Sample& sample) { build(sample.values()); }

PrefixSums::PrefixSums(std::span<const double> values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw InvalidData("observation " + std::to_string(i + 1) + " is not finite");
        }
    }
    build(values);
}

void PrefixSums::build(std::span<const double> values) {
    if (values.empty()) {
        throw InvalidData("prefix sums need at least one observation");
    }
    n_ = values.size();
    s_.assign(n_ + 1, 0.0);
    v_.assign(n_ + 1, 0.0);
    cs_.assign(n_ + 1, 0.0);
    cv_.assign(n_ + 1, 0.0);

    CompensatedSum s, v;
    for (std::size_t i = 0; i < n_; ++i) {
        s.add(values[i]);
        v.add(values[i] * values[i]);
        s_[i + 1] = s.value();
        v_[i + 1] = v.value();
    }

    centre_ = s.value() / static_cast<double>(n_);
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    constant_ = (*lo == *hi);
    if (constant_) {
        centre_ = *lo;
    }

    CompensatedSum cs, cv;
    for (std::size_t i = 0; i < n_; ++i) {
        const double d = values[i] - centre_;
        cs.add(d);
        cv.add(d * d);
        cs_[i + 1] = cs.value();
        cv_[i + 1] = cv.value();
    }
}

double PrefixSums::segment_ss_unclamped(std::size_t begin, std::size_t end) const noexcept {
    const double m = static_cast<double>(end - begin);
    const double sum = cs_[end] - cs_[begin];
    return (cv_[end] - cv_[begin]) - sum * sum / m;
}

double PrefixSums::segment_ss(std::size_t begin, std::size_t end) const noexcept {
    return std::max(0.0, segment_ss_unclamped(begin, end));
}

double PrefixSums::segment_centred_mean(std::size_t begin, std::size_t end) const noexcept {
    return (cs_[end] - cs_[begin]) / static_cast<double>(end - begin);
}

} // namespace amoc
