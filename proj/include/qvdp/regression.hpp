#pragma once

#include <cstddef>
#include <span>

namespace qvdp::regression {

/// Ordinary least squares y = intercept + slope x.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// Clamped to [0, 1]; 1 for a perfect fit.
  double r_squared = 0.0;
  /// Standard error of the slope; 0 for two points or a perfect fit.
  double slope_stderr = 0.0;
  std::size_t n_points = 0;
};

/// Throws InsufficientPointsError for fewer than `min_points` points (at least 2)
/// and DomainError when x has no spread.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y,
                     std::size_t min_points = 2);

/// Fit of log y against log x. Throws NonPositiveValueError for any value <= 0.
LinearFit log_log_fit(std::span<const double> x, std::span<const double> y,
                      std::size_t min_points = 2);

}  // namespace qvdp::regression
