#pragma once

// Leading-order eta -> 0 limits of the steady state in the three regimes.
// These are references (for truncation seeding, convergence checks and
// metrology baselines), not replacements for the exact closed forms.

#include <optional>
#include <variant>
#include <vector>

namespace qvdp::asymptotics {

enum class RegimeKind { normal, critical, time_crystal };

struct Regime {
  RegimeKind kind;
  double classification_tolerance;
};

/// |g - kappa| <= tolerance * kappa counts as the critical point.
Regime classify(double g, double kappa, double tolerance = 1e-12);

const char* to_string(RegimeKind kind);

struct GeometricLaw {
  double kappa;
  double g;
};
struct PoissonLaw {
  double mean;
};
using PnLaw = std::variant<GeometricLaw, PoissonLaw>;

struct PnLimit {
  double value;
  /// The time-crystal Poisson law is not an analytic result.
  bool approximate;
};

struct StdSusceptibilitySnr {
  double photon_std;
  double susceptibility;
  double snr;
};

struct LimitReport {
  Regime regime;
  std::vector<double> moments_limit;  // m = 0 .. max_order
  double photon_number_limit;
  double photon_std_limit;
  double susceptibility_limit;
  double g2_limit;
  double snr_limit;
  std::optional<PnLaw> pn_limit;  // absent at the critical point
};

/// Limit of <a^dag^m a^m>. eta is only used at and above threshold.
double limit_moments(double g, double kappa, double eta, int m, double tolerance = 1e-12);

StdSusceptibilitySnr limit_std_susceptibility_snr(double g, double kappa, double eta,
                                                  double tolerance = 1e-12);

double limit_g2(double g, double kappa, double tolerance = 1e-12);

/// Limiting p_n. Throws DomainError at the critical point, where no law is known.
PnLimit limit_pn(double g, double kappa, double eta, int n, double tolerance = 1e-12);

LimitReport limit_report(double g, double kappa, double eta, int max_order = 2,
                         double tolerance = 1e-12);

struct CriticalExponents {
  double omega1;  // eta N_a ~ delta_g^omega1
  double omega2;  // N_a |_{g = kappa} ~ eta^omega2
};

constexpr CriticalExponents critical_exponents_reference() { return {1.0, -0.5}; }

}  // namespace qvdp::asymptotics
