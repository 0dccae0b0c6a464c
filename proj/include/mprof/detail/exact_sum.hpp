#pragma once

#include <cmath>

namespace mprof::detail {

__extension__ using int128 = __int128;

/// Fixed-point accumulator for terms bounded by |x| < 8. Each term is rounded
/// to a multiple of 2^-60 and summed in a 128-bit integer, so the total is
/// independent of summation order and of simultaneous sign flips.
class ExactSum {
 public:
  void add(double x) noexcept { acc_ += static_cast<int128>(std::llround(x * kScale)); }
  double value() const noexcept { return static_cast<double>(acc_) / kScale; }

 private:
  static constexpr double kScale = 0x1p60;
  int128 acc_ = 0;
};

}  // namespace mprof::detail
