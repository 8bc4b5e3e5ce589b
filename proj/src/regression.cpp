#include "qvdp/regression.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "compensated.hpp"
#include "qvdp/error.hpp"

namespace qvdp::regression {

LinearFit linear_fit(std::span<const double> x, std::span<const double> y,
                     std::size_t min_points) {
  if (x.size() != y.size()) throw DomainError("linear_fit: x and y differ in length");
  const std::size_t n = x.size();
  if (n < std::max<std::size_t>(min_points, 2)) {
    throw InsufficientPointsError("linear_fit: " + std::to_string(n) + " points, need " +
                                  std::to_string(std::max<std::size_t>(min_points, 2)));
  }
  detail::CompensatedSum sx;
  detail::CompensatedSum sy;
  for (std::size_t i = 0; i < n; ++i) {
    sx.add(x[i]);
    sy.add(y[i]);
  }
  const double mx = sx.value() / static_cast<double>(n);
  const double my = sy.value() / static_cast<double>(n);
  detail::CompensatedSum sxx;
  detail::CompensatedSum sxy;
  detail::CompensatedSum syy;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx.add(dx * dx);
    sxy.add(dx * dy);
    syy.add(dy * dy);
  }
  if (!(sxx.value() > 0.0)) throw DomainError("linear_fit: x values have no spread");

  LinearFit f;
  f.n_points = n;
  f.slope = sxy.value() / sxx.value();
  f.intercept = my - f.slope * mx;
  detail::CompensatedSum ss_res;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    ss_res.add(r * r);
  }
  f.r_squared = syy.value() > 0.0 ? std::clamp(1.0 - ss_res.value() / syy.value(), 0.0, 1.0) : 1.0;
  f.slope_stderr =
      n > 2 ? std::sqrt(ss_res.value() / static_cast<double>(n - 2) / sxx.value()) : 0.0;
  return f;
}

LinearFit log_log_fit(std::span<const double> x, std::span<const double> y,
                      std::size_t min_points) {
  if (x.size() != y.size()) throw DomainError("log_log_fit: x and y differ in length");
  std::vector<double> lx(x.size());
  std::vector<double> ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      throw NonPositiveValueError("log_log_fit: point " + std::to_string(i) +
                                  " has a value <= 0 (x = " + std::to_string(x[i]) +
                                  ", y = " + std::to_string(y[i]) + ")");
    }
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  return linear_fit(lx, ly, min_points);
}

}  // namespace qvdp::regression
