#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace ricciot {

/// Neumaier-compensated accumulator. Batch results combined in a fixed order
/// agree to the last few ulps irrespective of how the batches were scheduled.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  void add(const CompensatedSum& other) {
    add(other.sum_);
    add(other.comp_);
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Mean and standard error from first and second moments, both compensated.
class MomentAccumulator {
 public:
  void add(double x) {
    ++count_;
    sum_.add(x);
    sum_sq_.add(x * x);
  }
  void merge(const MomentAccumulator& other) {
    count_ += other.count_;
    sum_.add(other.sum_);
    sum_sq_.add(other.sum_sq_);
  }

  std::size_t count() const { return count_; }
  double mean() const { return count_ == 0 ? 0.0 : sum_.value() / static_cast<double>(count_); }
  double variance() const {
    if (count_ < 2) return 0.0;
    const double n = static_cast<double>(count_);
    const double m = mean();
    const double v = (sum_sq_.value() - n * m * m) / (n - 1.0);
    return v > 0.0 ? v : 0.0;
  }
  double stddev() const { return std::sqrt(variance()); }
  double std_error() const { return count_ == 0 ? 0.0 : std::sqrt(variance() / static_cast<double>(count_)); }

 private:
  std::size_t count_ = 0;
  CompensatedSum sum_;
  CompensatedSum sum_sq_;
};

/// Least-squares slope of log|y| against log x.
double loglog_slope(std::span<const double> x, std::span<const double> y);

struct PowerLaw2d {
  double log_constant = 0.0;
  double exponent_first = 0.0;
  double exponent_second = 0.0;
};

/// Fits log|r| = c + p log a + q log b by least squares.
PowerLaw2d fit_power_law_2d(std::span<const double> a, std::span<const double> b, std::span<const double> r);

}  // namespace ricciot
