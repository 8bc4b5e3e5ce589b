#include "qvdp/asymptotics.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qvdp/error.hpp"
#include "qvdp/specialfn.hpp"

namespace qvdp::asymptotics {

namespace {

using std::numbers::pi;

void require_eta(double eta) {
  if (!(eta > 0.0)) throw DomainError("asymptotics: eta must be > 0 at or above threshold");
}

}  // namespace

Regime classify(double g, double kappa, double tolerance) {
  if (!(kappa > 0.0) || !(g >= 0.0)) throw DomainError("classify: need kappa > 0, g >= 0");
  if (std::abs(g - kappa) <= tolerance * kappa) return {RegimeKind::critical, tolerance};
  return {g < kappa ? RegimeKind::normal : RegimeKind::time_crystal, tolerance};
}

const char* to_string(RegimeKind kind) {
  switch (kind) {
    case RegimeKind::normal:
      return "normal";
    case RegimeKind::critical:
      return "critical";
    case RegimeKind::time_crystal:
      return "time_crystal";
  }
  return "?";
}

double limit_moments(double g, double kappa, double eta, int m, double tolerance) {
  if (m < 0) throw DomainError("limit_moments: order must be >= 0");
  const double md = m;
  switch (classify(g, kappa, tolerance).kind) {
    case RegimeKind::normal:
      return std::exp(specialfn::log_gamma(md + 1.0)) * std::pow(g / (kappa - g), md);
    case RegimeKind::critical:
      require_eta(eta);
      return std::exp(specialfn::log_gamma((md + 1.0) / 2.0) - specialfn::log_gamma(0.5)) *
             std::pow(kappa / eta, md / 2.0);
    case RegimeKind::time_crystal:
      require_eta(eta);
      return std::pow((g - kappa) / (2.0 * eta), md);
  }
  return 0.0;
}

StdSusceptibilitySnr limit_std_susceptibility_snr(double g, double kappa, double eta,
                                                  double tolerance) {
  switch (classify(g, kappa, tolerance).kind) {
    case RegimeKind::normal:
      return {std::sqrt(g * kappa) / (kappa - g), kappa / ((kappa - g) * (kappa - g)),
              kappa / (g * (kappa - g) * (kappa - g))};
    case RegimeKind::critical: {
      require_eta(eta);
      const double c = (pi - 2.0) / (2.0 * pi);
      return {std::sqrt(c * kappa / eta), c / eta, c / (eta * kappa)};
    }
    case RegimeKind::time_crystal:
      require_eta(eta);
      return {std::sqrt((g - kappa) / (2.0 * eta)), 1.0 / (2.0 * eta),
              1.0 / (2.0 * eta * (g - kappa))};
  }
  return {};
}

double limit_g2(double g, double kappa, double tolerance) {
  switch (classify(g, kappa, tolerance).kind) {
    case RegimeKind::normal:
      return 2.0;
    case RegimeKind::critical:
      return pi / 2.0;
    case RegimeKind::time_crystal:
      return 1.0;
  }
  return 0.0;
}

PnLimit limit_pn(double g, double kappa, double eta, int n, double tolerance) {
  if (n < 0) throw DomainError("limit_pn: n must be >= 0");
  const double nd = n;
  switch (classify(g, kappa, tolerance).kind) {
    case RegimeKind::normal:
      return {(kappa - g) / kappa * std::pow(g / kappa, nd), false};
    case RegimeKind::critical:
      throw DomainError("limit_pn: no closed photon-number law at the critical point");
    case RegimeKind::time_crystal: {
      require_eta(eta);
      const double mean = (g - kappa) / (2.0 * eta);
      return {std::exp(nd * std::log(mean) - mean - specialfn::log_gamma(nd + 1.0)), true};
    }
  }
  return {0.0, false};
}

LimitReport limit_report(double g, double kappa, double eta, int max_order, double tolerance) {
  if (max_order < 0) throw DomainError("limit_report: max_order must be >= 0");
  LimitReport r{};
  r.regime = classify(g, kappa, tolerance);
  for (int m = 0; m <= max_order; ++m) {
    r.moments_limit.push_back(limit_moments(g, kappa, eta, m, tolerance));
  }
  r.photon_number_limit = limit_moments(g, kappa, eta, 1, tolerance);
  const auto s = limit_std_susceptibility_snr(g, kappa, eta, tolerance);
  r.photon_std_limit = s.photon_std;
  r.susceptibility_limit = s.susceptibility;
  r.snr_limit = s.snr;
  r.g2_limit = limit_g2(g, kappa, tolerance);
  switch (r.regime.kind) {
    case RegimeKind::normal:
      r.pn_limit = GeometricLaw{kappa, g};
      break;
    case RegimeKind::time_crystal:
      r.pn_limit = PoissonLaw{(g - kappa) / (2.0 * eta)};
      break;
    case RegimeKind::critical:
      break;
  }
  return r;
}

}  // namespace qvdp::asymptotics
