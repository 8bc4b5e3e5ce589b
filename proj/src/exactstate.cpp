#include "qvdp/exactstate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "compensated.hpp"
#include "parallel.hpp"
#include "qvdp/asymptotics.hpp"
#include "qvdp/error.hpp"
#include "qvdp/specialfn.hpp"

namespace qvdp::exactstate {

namespace {

using std::numbers::pi;
using specialfn::hyp0f1_log;
using specialfn::hyp1f1_log;

constexpr std::size_t kMaxAutoTruncation = std::size_t{1} << 22;

specialfn::SeriesOptions series_options(const SystemParams& p) {
  specialfn::SeriesOptions o;
  o.max_terms = p.numerics().max_series_terms;
  return o;
}

void require_pump(const SystemParams& p, const char* op) {
  if (!(p.g() > 0.0)) throw DomainError(std::string(op) + ": requires g > 0");
}

// log 1F1(1; (kappa+g)/eta; 2g/eta), the normalisation shared by every closed form.
double log_normalization(const SystemParams& p) {
  return hyp1f1_log(1.0, p.pump_parameter(), 2.0 * p.g() / p.eta(), series_options(p))
      .log_magnitude;
}

struct TailCheck {
  bool ok;
  double ratio;
};

TailCheck check_tail(const std::vector<double>& probs, double tolerance) {
  const double peak = *std::max_element(probs.begin(), probs.end());
  const double ratio = probs.back() / peak;
  return {ratio < tolerance, ratio};
}

DiagonalState closed_form_distribution(const SystemParams& p, std::size_t trunc) {
  const auto opts = series_options(p);
  const double z = p.g() / p.eta();
  const double log_z = std::log(z);
  const double b = p.pump_parameter();
  const double log_den = log_normalization(p);

  std::vector<double> log_p(trunc);
  detail::CompensatedSum log_rising;  // log (b)_n
  for (std::size_t n = 0; n < trunc; ++n) {
    const double nd = static_cast<double>(n);
    log_p[n] = nd * log_z + hyp1f1_log(1.0 + nd, b + nd, z, opts).log_magnitude -
               log_rising.value() - log_den;
    log_rising.add(std::log(b + nd));
  }

  const double peak = *std::max_element(log_p.begin(), log_p.end());
  DiagonalState s;
  s.truncation = trunc;
  s.source = StateSource::closed_form;
  s.probabilities.resize(trunc);
  detail::CompensatedSum mass;
  for (std::size_t n = 0; n < trunc; ++n) {
    s.probabilities[n] = std::exp(log_p[n] - peak);
    mass.add(s.probabilities[n]);
  }
  for (double& v : s.probabilities) v /= mass.value();
  s.unnormalized_mass = mass.value() * std::exp(peak);
  return s;
}

double default_half_width(std::optional<double> radius) {
  return std::max(3.0, 2.0 * radius.value_or(0.0) + 5.0 / std::numbers::sqrt2);
}

std::vector<double> symmetric_axis(double half_width, std::size_t points) {
  if (points < 2) throw DomainError("GridSpec: need at least 2 points per axis");
  if (!(half_width > 0.0)) throw DomainError("GridSpec: half_width must be > 0");
  std::vector<double> axis(points);
  const double denom = static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) {
    // Exactly antisymmetric about the centre.
    axis[i] = half_width * (2.0 * static_cast<double>(i) - denom) / denom;
  }
  return axis;
}

template <class PointFn>
WignerField fill_grid(double half_width, std::size_t points, PointFn&& fn) {
  WignerField f;
  f.x = symmetric_axis(half_width, points);
  f.y = f.x;
  f.dx = f.x[1] - f.x[0];
  f.dy = f.dx;
  f.values.resize(points * points);
  detail::parallel_for(points, [&](std::size_t iy) {
    for (std::size_t ix = 0; ix < points; ++ix) {
      f.values[iy * points + ix] = fn(f.x[ix], f.y[iy]);
    }
  });
  return f;
}

}  // namespace

double DiagonalState::max_probability() const {
  return probabilities.empty() ? 0.0 : *std::max_element(probabilities.begin(), probabilities.end());
}

std::size_t seed_truncation(const SystemParams& p) {
  using asymptotics::RegimeKind;
  const double g = p.g();
  const double kappa = p.kappa();
  const double eta = p.eta();
  const double mu_c = std::sqrt(kappa / (pi * eta));
  const double sigma_c = std::sqrt((pi - 2.0) / (2.0 * pi) * kappa / eta);
  double mu = mu_c;
  double sigma = sigma_c;
  switch (asymptotics::classify(g, kappa).kind) {
    case RegimeKind::normal:
      // N_a grows with g, so the threshold values bound the normal-phase ones.
      mu = std::min(g / (kappa - g), mu_c);
      sigma = std::min(std::sqrt(g * kappa) / (kappa - g), sigma_c);
      break;
    case RegimeKind::critical:
      break;
    case RegimeKind::time_crystal:
      mu = std::max((g - kappa) / (2.0 * eta), mu_c);
      sigma = std::max(std::sqrt((g - kappa) / (2.0 * eta)), sigma_c);
      break;
  }
  return static_cast<std::size_t>(std::ceil(mu + 12.0 * std::sqrt(sigma * sigma + 1.0) + 20.0));
}

std::size_t auto_truncation(const SystemParams& p) {
  return photon_distribution(p.with_truncation(std::nullopt)).truncation;
}

DiagonalState photon_distribution(const SystemParams& p, std::optional<std::size_t> trunc) {
  require_pump(p, "photon_distribution");
  const auto requested = trunc ? trunc : p.numerics().truncation;
  const double tol = p.numerics().tail_tolerance;
  if (requested) {
    if (*requested < 2) throw DomainError("photon_distribution: truncation must be >= 2");
    auto s = closed_form_distribution(p, *requested);
    const auto tail = check_tail(s.probabilities, tol);
    if (!tail.ok) {
      throw TruncationError("photon_distribution: truncation " + std::to_string(*requested) +
                            " leaves tail ratio " + std::to_string(tail.ratio));
    }
    return s;
  }
  for (std::size_t n = seed_truncation(p); n <= kMaxAutoTruncation; n *= 2) {
    auto s = closed_form_distribution(p, n);
    if (check_tail(s.probabilities, tol).ok) return s;
  }
  throw TruncationError("photon_distribution: tail does not decay below the tolerance");
}

MomentReport factorial_moments(const SystemParams& p, int max_order) {
  require_pump(p, "factorial_moments");
  if (max_order < 1) throw DomainError("factorial_moments: max_order must be >= 1");
  const auto opts = series_options(p);
  const double z = p.g() / p.eta();
  const double b = p.pump_parameter();
  const double log_den = log_normalization(p);
  const int top = std::max(max_order, 2);

  std::vector<double> moments(static_cast<std::size_t>(top) + 1);
  moments[0] = 1.0;
  for (int m = 1; m <= top; ++m) {
    const double md = m;
    const double log_m = specialfn::log_gamma(md + 1.0) + md * std::log(z) +
                         hyp1f1_log(1.0 + md, b + md, 2.0 * z, opts).log_magnitude -
                         specialfn::pochhammer_log(b, static_cast<std::size_t>(m)).log_magnitude -
                         log_den;
    moments[static_cast<std::size_t>(m)] = std::exp(log_m);
  }

  MomentReport r;
  r.photon_number = moments[1];
  const double var = moments[2] + moments[1] - moments[1] * moments[1];
  r.photon_std = std::sqrt(std::max(var, 0.0));
  r.g2 = moments[2] / (moments[1] * moments[1]);
  moments.resize(static_cast<std::size_t>(max_order) + 1);
  r.factorial_moments = std::move(moments);
  return r;
}

MomentReport moments_from_distribution(const DiagonalState& state, int max_order,
                                       TailPolicy tail) {
  if (max_order < 0) throw DomainError("moments_from_distribution: max_order must be >= 0");
  const auto& p = state.probabilities;
  if (p.empty()) throw DomainError("moments_from_distribution: empty distribution");
  detail::CompensatedSum norm;
  for (double v : p) norm.add(v);
  if (std::abs(norm.value() - 1.0) > 1e-8) {
    throw DomainError("moments_from_distribution: distribution not normalised (sum = " +
                      std::to_string(norm.value()) + ")");
  }

  const int top = std::max(max_order, 2);
  std::vector<double> moments(static_cast<std::size_t>(top) + 1, 0.0);
  for (int m = 0; m <= top; ++m) {
    const auto mu = static_cast<std::size_t>(m);
    detail::CompensatedSum acc;
    double last = 0.0;
    for (std::size_t n = mu; n < p.size(); ++n) {
      // n! / (n - m)! = (n - m + 1)_m
      const double w =
          m == 0 ? 1.0
                 : specialfn::pochhammer_log(static_cast<double>(n - mu + 1), mu).value();
      last = w * p[n];
      acc.add(last);
    }
    moments[mu] = acc.value();
    if (tail == TailPolicy::enforce && m <= max_order && acc.value() > 0.0 &&
        last > 1e-8 * acc.value()) {
      throw TruncationError("moments_from_distribution: weighted tail of order " +
                            std::to_string(m) + " exceeds 1e-8 of the moment");
    }
  }

  MomentReport r;
  r.photon_number = moments[1];
  const double var = moments[2] + moments[1] - moments[1] * moments[1];
  r.photon_std = std::sqrt(std::max(var, 0.0));
  r.g2 = moments[1] > 0.0 ? moments[2] / (moments[1] * moments[1])
                          : std::numeric_limits<double>::quiet_NaN();
  moments.resize(static_cast<std::size_t>(max_order) + 1);
  r.factorial_moments = std::move(moments);
  return r;
}

double rescaled_photon_number(const SystemParams& p) {
  return p.eta() * factorial_moments(p, 1).photon_number;
}

double WignerField::integral() const {
  detail::CompensatedSum acc;
  for (double v : values) acc.add(v);
  return acc.value() * dx * dy;
}

std::optional<double> mean_field_radius(const SystemParams& p) {
  if (p.g() > p.kappa()) return std::sqrt((p.g() - p.kappa()) / (2.0 * p.eta()));
  return std::nullopt;
}

namespace {

double wigner_radial(const SystemParams& p, double r2, double log_den,
                     const specialfn::SeriesOptions& opts) {
  const double log_w = std::log(2.0 / pi) - 2.0 * r2 +
                       hyp0f1_log(p.pump_parameter(), 4.0 * p.g() * r2 / p.eta(), opts).log_magnitude -
                       log_den;
  return std::exp(log_w);
}

}  // namespace

double wigner_point(const SystemParams& p, std::complex<double> z) {
  const double r2 = z.real() * z.real() + z.imag() * z.imag();
  return wigner_radial(p, r2, log_normalization(p), series_options(p));
}

WignerField wigner(const SystemParams& p, const GridSpec& grid) {
  const auto radius = mean_field_radius(p);
  double half_width = 0.0;
  if (grid.half_width) {
    half_width = *grid.half_width;
  } else {
    // Near threshold the photon-number spread outgrows the radius-based extent.
    const auto m = factorial_moments(p, 2);
    const double spread = std::sqrt(m.photon_number + 5.0 * m.photon_std) + 2.0;
    half_width = std::max(default_half_width(radius), spread);
  }
  const double log_den = log_normalization(p);
  const auto opts = series_options(p);
  auto f = fill_grid(half_width, grid.points, [&](double x, double y) {
    return wigner_radial(p, x * x + y * y, log_den, opts);
  });
  f.mean_field_radius = radius;
  return f;
}

double wigner_ridge_radius(const SystemParams& p) {
  const double log_den = log_normalization(p);
  const auto opts = series_options(p);
  const auto profile = [&](double r) { return wigner_radial(p, r * r, log_den, opts); };

  const double r_max = default_half_width(mean_field_radius(p));
  constexpr int kScan = 2000;
  const double h = r_max / kScan;
  int best = 0;
  double best_value = profile(0.0);
  for (int i = 1; i <= kScan; ++i) {
    const double v = profile(i * h);
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  // Golden-section refinement inside the bracketing scan cells.
  double lo = std::max(0.0, (best - 1) * h);
  double hi = std::min(r_max, (best + 1) * h);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = hi - inv_phi * (hi - lo);
  double b = lo + inv_phi * (hi - lo);
  double fa = profile(a);
  double fb = profile(b);
  for (int it = 0; it < 100 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
    if (fa < fb) {
      lo = a;
      a = b;
      fa = fb;
      b = lo + inv_phi * (hi - lo);
      fb = profile(b);
    } else {
      hi = b;
      b = a;
      fb = fa;
      a = hi - inv_phi * (hi - lo);
      fa = profile(a);
    }
  }
  return 0.5 * (lo + hi);
}

DrivenBranchParams::DrivenBranchParams(double delta, std::complex<double> epsilon)
    : delta_(delta), epsilon_(epsilon) {
  if (!std::isfinite(delta) || !std::isfinite(epsilon.real()) || !std::isfinite(epsilon.imag())) {
    throw DomainError("DrivenBranchParams: delta and epsilon must be finite");
  }
}

std::complex<double> DrivenBranchParams::c(const SystemParams& p) const {
  return std::complex<double>(0.0, -2.0) * epsilon_ / p.eta();
}

std::complex<double> DrivenBranchParams::d(const SystemParams& p) const {
  return std::complex<double>(0.0, 2.0) * std::complex<double>(delta_, p.kappa() / 2.0) / p.eta();
}

namespace {

void require_undriven_pump(const SystemParams& p) {
  if (p.g() != 0.0) throw DomainError("driven branch: closed form exists only for g = 0");
}

double driven_normalization(const SystemParams& p, const DrivenBranchParams& driven,
                            const specialfn::SeriesOptions& opts) {
  const auto c = driven.c(p);
  const auto d = driven.d(p);
  const auto norm = specialfn::hyp_complex({{}, {-d, -std::conj(d)}, 2.0 * std::norm(c)}, opts);
  return norm.real();
}

double driven_point(const SystemParams& p, const DrivenBranchParams& driven,
                    std::complex<double> z, double norm, const specialfn::SeriesOptions& opts) {
  const auto c = driven.c(p);
  const auto d = driven.d(p);
  const auto f = specialfn::hyp_complex({{}, {-d}, 2.0 * c * std::conj(z)}, opts);
  return 2.0 / pi * std::exp(-2.0 * std::norm(z)) * std::norm(f) / norm;
}

}  // namespace

double driven_branch_wigner(const SystemParams& p, const DrivenBranchParams& driven,
                            std::complex<double> z) {
  require_undriven_pump(p);
  const auto opts = series_options(p);
  return driven_point(p, driven, z, driven_normalization(p, driven, opts), opts);
}

WignerField driven_branch_wigner_grid(const SystemParams& p, const DrivenBranchParams& driven,
                                      const GridSpec& grid) {
  require_undriven_pump(p);
  const auto opts = series_options(p);
  const double norm = driven_normalization(p, driven, opts);
  // Weak-drive amplitude |epsilon / (delta + i kappa/2)| sets the default extent.
  const double amplitude =
      std::abs(driven.epsilon()) / std::abs(std::complex<double>(driven.delta(), p.kappa() / 2.0));
  const double half_width = grid.half_width.value_or(default_half_width(amplitude));
  return fill_grid(half_width, grid.points, [&](double x, double y) {
    return driven_point(p, driven, {x, y}, norm, opts);
  });
}

}  // namespace qvdp::exactstate
