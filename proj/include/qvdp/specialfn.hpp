#pragma once

// Gamma-family and hypergeometric functions evaluated in a form that survives
// the extreme arguments of the small-eta regime (parameters and arguments up
// to ~1e6). Real-parameter series are accumulated with a running scale so the
// partial sums never overflow; results are returned as logarithms.

#include <complex>
#include <cstddef>
#include <vector>

namespace qvdp::specialfn {

/// Signed logarithmic representation of a real number.
/// sign == 0 means the value is exactly zero (log_magnitude is then -inf).
struct LogValue {
  double log_magnitude = 0.0;
  int sign = 1;

  static LogValue zero();
  static LogValue one() { return {0.0, 1}; }
  static LogValue from(double value);

  /// exp(log_magnitude) with sign; overflows to +-inf when out of range.
  [[nodiscard]] double value() const;
  [[nodiscard]] bool is_zero() const { return sign == 0; }
};

LogValue operator*(const LogValue& a, const LogValue& b);
LogValue operator/(const LogValue& a, const LogValue& b);

struct SeriesOptions {
  std::size_t max_terms = 10'000'000;
  /// Terms below this fraction of the running sum count as negligible.
  double negligible = 1e-18;
  /// Number of consecutive negligible terms required to stop.
  std::size_t tail_run = 50;
};

/// ln Gamma(x) for x > 0.
double log_gamma(double x);

/// log of the rising factorial (x)_n = x (x+1) ... (x+n-1); (x)_0 = 1.
LogValue pochhammer_log(double x, std::size_t n);

/// log 1F1(a; b; z) for a >= 0, b > 0, z >= 0.
LogValue hyp1f1_log(double a, double b, double z, const SeriesOptions& opts = {});

/// log 0F1(; b; z) for b > 0, z >= 0.
LogValue hyp0f1_log(double b, double z, const SeriesOptions& opts = {});

/// Parameters of a pFq series with complex entries. Supported kinds are
/// 0F1, 1F1 and 0F2.
struct HypergeometricSpec {
  std::vector<std::complex<double>> numerator_params;
  std::vector<std::complex<double>> denominator_params;
  std::complex<double> argument;
};

/// Direct complex series summation, intended for moderate |z|.
std::complex<double> hyp_complex(const HypergeometricSpec& spec, const SeriesOptions& opts = {});

}  // namespace qvdp::specialfn
