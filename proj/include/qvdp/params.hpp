#pragma once

#include <cstddef>
#include <optional>

namespace qvdp {

/// Numerical controls carried alongside the physical rates.
struct NumericalControls {
  /// Number of Fock levels kept (n = 0 .. truncation-1). Automatic when empty.
  std::optional<std::size_t> truncation;
  /// Tail criterion: p_{last} < tail_tolerance * max_n p_n.
  double tail_tolerance = 1e-12;
  /// Term cap for every hypergeometric series.
  std::size_t max_series_terms = 10'000'000;

  friend bool operator==(const NumericalControls&, const NumericalControls&) = default;
};

/// Rates of the oscillator: one-photon pump g, one-photon loss kappa,
/// two-photon loss eta and cavity frequency omega0. Rates are in the same
/// (arbitrary) unit; kappa = 1 is customary.
class SystemParams {
 public:
  SystemParams(double g, double eta, double kappa = 1.0, double omega0 = 0.0,
               NumericalControls numerics = {});

  [[nodiscard]] double g() const { return g_; }
  [[nodiscard]] double kappa() const { return kappa_; }
  [[nodiscard]] double eta() const { return eta_; }
  [[nodiscard]] double omega0() const { return omega0_; }
  [[nodiscard]] const NumericalControls& numerics() const { return numerics_; }

  /// (kappa + g - 2 eta) / eta, the exponent of the steady-state P function.
  [[nodiscard]] double q_exponent() const { return (kappa_ + g_ - 2.0 * eta_) / eta_; }
  /// (kappa + g) / eta = q_exponent + 2, the recurring hypergeometric parameter.
  [[nodiscard]] double pump_parameter() const { return (kappa_ + g_) / eta_; }
  /// Distance from threshold, g - kappa.
  [[nodiscard]] double delta_g() const { return g_ - kappa_; }

  [[nodiscard]] SystemParams with_g(double g) const;
  [[nodiscard]] SystemParams with_eta(double eta) const;
  [[nodiscard]] SystemParams with_truncation(std::optional<std::size_t> trunc) const;

  friend bool operator==(const SystemParams&, const SystemParams&) = default;

 private:
  double g_;
  double eta_;
  double kappa_;
  double omega0_;
  NumericalControls numerics_;
};

}  // namespace qvdp
