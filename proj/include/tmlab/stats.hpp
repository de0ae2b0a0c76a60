#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace tmlab {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Sample mean and standard error of the mean, fed in a fixed order.
class MeanEstimator {
 public:
  void add(double v) {
    if (n_ == 0) lo_ = hi_ = v;
    lo_ = std::min(lo_, v);
    hi_ = std::max(hi_, v);
    ++n_;
    sum_.add(v);
    sq_.add(v * v);
  }
  std::size_t count() const { return n_; }
  double mean() const { return n_ == 0 ? 0.0 : sum_.value() / static_cast<double>(n_); }
  double stderr_of_mean() const {
    if (n_ < 2 || lo_ == hi_) return 0.0;
    const double n = static_cast<double>(n_);
    const double m = mean();
    const double var = std::max(0.0, (sq_.value() - n * m * m) / (n - 1));
    return std::sqrt(var / n);
  }

 private:
  std::size_t n_ = 0;
  double lo_ = 0.0, hi_ = 0.0;
  CompensatedSum sum_;
  CompensatedSum sq_;
};

}  // namespace tmlab
