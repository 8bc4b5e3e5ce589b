#include "qvdp/specialfn.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "compensated.hpp"
#include "qvdp/error.hpp"

namespace qvdp::specialfn {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Partial sums are renormalised once they pass this magnitude.
constexpr double kRescaleThreshold = 1e250;

// Direct summation of logs is used for (x)_n up to this n.
constexpr std::size_t kDirectPochhammer = 4096;

// Sums 1 + t_1 + t_2 + ... with t_{k+1} = t_k * ratio(k), all terms >= 0.
// The running sum is kept in [1, kRescaleThreshold] by moving its magnitude
// into log_scale, so this is a log-domain accumulation with running-maximum
// rescaling (the sum of positive terms dominates every term).
template <class Ratio>
LogValue positive_series_log(Ratio ratio, const SeriesOptions& opts, const char* name) {
  double term = 1.0;
  double log_scale = 0.0;
  detail::CompensatedSum acc;
  acc.add(1.0);
  std::size_t negligible_run = 0;

  for (std::size_t k = 0;; ++k) {
    if (k >= opts.max_terms) {
      throw ConvergenceError(std::string(name) + ": no convergence after " +
                             std::to_string(opts.max_terms) + " terms");
    }
    const double r = ratio(k);
    if (r == 0.0) break;
    term *= r;
    acc.add(term);

    const double total = acc.value();
    if (total > kRescaleThreshold) {
      acc.sum /= total;
      acc.comp /= total;
      term /= total;
      log_scale += std::log(total);
    }
    if (!std::isfinite(total)) {
      throw ConvergenceError(std::string(name) + ": non-finite partial sum");
    }

    // r < 1 guarantees we are past the peak of the (eventually decreasing) terms.
    if (r < 1.0 && term < opts.negligible * acc.value()) {
      if (++negligible_run >= opts.tail_run) break;
    } else {
      negligible_run = 0;
    }
  }
  return {std::log(acc.value()) + log_scale, 1};
}

bool is_nonpositive_integer(std::complex<double> b) {
  return b.imag() == 0.0 && b.real() <= 0.0 && b.real() == std::round(b.real());
}

}  // namespace

LogValue LogValue::zero() { return {kNegInf, 0}; }

LogValue LogValue::from(double value) {
  if (value == 0.0) return zero();
  return {std::log(std::abs(value)), value > 0 ? 1 : -1};
}

double LogValue::value() const {
  if (sign == 0) return 0.0;
  return sign * std::exp(log_magnitude);
}

LogValue operator*(const LogValue& a, const LogValue& b) {
  if (a.is_zero() || b.is_zero()) return LogValue::zero();
  return {a.log_magnitude + b.log_magnitude, a.sign * b.sign};
}

LogValue operator/(const LogValue& a, const LogValue& b) {
  if (b.is_zero()) throw DomainError("LogValue: division by zero");
  if (a.is_zero()) return LogValue::zero();
  return {a.log_magnitude - b.log_magnitude, a.sign * b.sign};
}

double log_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError("log_gamma: argument must be finite and > 0, got " + std::to_string(x));
  }
  int sign = 0;
  // lgamma_r: the plain lgamma writes the global signgam.
  return ::lgamma_r(x, &sign);
}

LogValue pochhammer_log(double x, std::size_t n) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError("pochhammer_log: x must be finite and > 0, got " + std::to_string(x));
  }
  if (n == 0) return LogValue::one();
  if (n <= kDirectPochhammer) {
    detail::CompensatedSum acc;
    for (std::size_t i = 0; i < n; ++i) acc.add(std::log(x + static_cast<double>(i)));
    return {acc.value(), 1};
  }
  return {log_gamma(x + static_cast<double>(n)) - log_gamma(x), 1};
}

LogValue hyp1f1_log(double a, double b, double z, const SeriesOptions& opts) {
  if (!(b > 0.0) || !(a >= 0.0) || !(z >= 0.0) || !std::isfinite(a) || !std::isfinite(b) ||
      !std::isfinite(z)) {
    throw DomainError("hyp1f1_log: requires a >= 0, b > 0, z >= 0");
  }
  if (z == 0.0 || a == 0.0) return LogValue::one();
  return positive_series_log(
      [=](std::size_t k) {
        const double kd = static_cast<double>(k);
        return (a + kd) / (b + kd) * (z / (kd + 1.0));
      },
      opts, "hyp1f1_log");
}

LogValue hyp0f1_log(double b, double z, const SeriesOptions& opts) {
  if (!(b > 0.0) || !(z >= 0.0) || !std::isfinite(b) || !std::isfinite(z)) {
    throw DomainError("hyp0f1_log: requires b > 0, z >= 0");
  }
  if (z == 0.0) return LogValue::one();
  return positive_series_log(
      [=](std::size_t k) {
        const double kd = static_cast<double>(k);
        return z / ((b + kd) * (kd + 1.0));
      },
      opts, "hyp0f1_log");
}

std::complex<double> hyp_complex(const HypergeometricSpec& spec, const SeriesOptions& opts) {
  const std::size_t p = spec.numerator_params.size();
  const std::size_t q = spec.denominator_params.size();
  const bool supported = (p == 0 && q == 1) || (p == 1 && q == 1) || (p == 0 && q == 2);
  if (!supported) {
    throw DomainError("hyp_complex: unsupported kind " + std::to_string(p) + "F" +
                      std::to_string(q) + " (supported: 0F1, 1F1, 0F2)");
  }
  for (const auto& b : spec.denominator_params) {
    if (is_nonpositive_integer(b)) {
      throw PoleError("hyp_complex: denominator parameter " + std::to_string(b.real()) +
                      " is a non-positive integer");
    }
  }
  const std::complex<double> z = spec.argument;
  if (z == 0.0) return {1.0, 0.0};

  std::complex<double> term{1.0, 0.0};
  detail::CompensatedSum re;
  detail::CompensatedSum im;
  re.add(1.0);
  std::size_t negligible_run = 0;

  for (std::size_t k = 0;; ++k) {
    if (k >= opts.max_terms) {
      throw ConvergenceError("hyp_complex: no convergence after " +
                             std::to_string(opts.max_terms) + " terms");
    }
    const double kd = static_cast<double>(k);
    std::complex<double> ratio = z / (kd + 1.0);
    for (const auto& a : spec.numerator_params) ratio *= (a + kd);
    for (const auto& b : spec.denominator_params) ratio /= (b + kd);
    if (ratio == 0.0) break;
    term *= ratio;
    re.add(term.real());
    im.add(term.imag());

    const std::complex<double> partial{re.value(), im.value()};
    if (!std::isfinite(partial.real()) || !std::isfinite(partial.imag())) {
      throw ConvergenceError("hyp_complex: non-finite partial sum (argument too large)");
    }
    if (std::abs(ratio) < 1.0 && std::abs(term) < opts.negligible * std::abs(partial)) {
      if (++negligible_run >= opts.tail_run) break;
    } else {
      negligible_run = 0;
    }
  }
  return {re.value(), im.value()};
}

}  // namespace qvdp::specialfn
