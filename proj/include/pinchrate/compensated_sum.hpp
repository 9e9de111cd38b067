#pragma once

#include <cmath>
#include <concepts>

namespace pinchrate {

/// Neumaier's variant of Kahan summation: also correct when the addend is
/// larger in magnitude than the running sum.
template <std::floating_point T>
class CompensatedSum {
 public:
  CompensatedSum() = default;
  explicit CompensatedSum(T initial) : sum_(initial) {}

  CompensatedSum& operator+=(T value) {
    const T t = sum_ + value;
    if (std::fabs(sum_) >= std::fabs(value)) {
      compensation_ += (sum_ - t) + value;
    } else {
      compensation_ += (value - t) + sum_;
    }
    sum_ = t;
    return *this;
  }

  CompensatedSum& operator+=(const CompensatedSum& other) {
    *this += other.sum_;
    *this += other.compensation_;
    return *this;
  }

  T value() const { return sum_ + compensation_; }

 private:
  T sum_ = 0;
  T compensation_ = 0;
};

}  // namespace pinchrate
