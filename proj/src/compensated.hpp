#pragma once

#include <cmath>

namespace qvdp::detail {

// Neumaier's variant of Kahan summation.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }

  [[nodiscard]] double value() const { return sum + comp; }
};

}  // namespace qvdp::detail
