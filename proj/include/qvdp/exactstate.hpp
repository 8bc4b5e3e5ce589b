#pragma once

// Closed-form steady state of the quantum van der Pol oscillator:
// photon-number distribution, normally ordered moments, Wigner function,
// plus the g = 0 coherently driven branch.

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "qvdp/params.hpp"

namespace qvdp::exactstate {

enum class StateSource { closed_form, oracle };

/// Diagonal of the steady-state density matrix, p_n for n = 0 .. truncation-1.
struct DiagonalState {
  std::vector<double> probabilities;
  std::size_t truncation = 0;
  StateSource source = StateSource::closed_form;
  /// Sum of the closed-form p_n before renormalisation (closed_form only).
  std::optional<double> unnormalized_mass;

  [[nodiscard]] double max_probability() const;
};

struct MomentReport {
  std::vector<double> factorial_moments;  // <a^dag^m a^m>, m = 0 .. M
  double photon_number = 0.0;
  double photon_std = 0.0;
  /// NaN when the photon number is zero.
  double g2 = 0.0;
};

/// Fock-level count from the limit formulas, ceil(mu + 12 sqrt(sigma^2 + 1) + 20).
/// This is only the seed; photon_distribution doubles it until the tail is small.
std::size_t seed_truncation(const SystemParams& params);

/// Smallest automatic truncation whose tail passes (seed, doubled as needed).
std::size_t auto_truncation(const SystemParams& params);

/// Closed-form p_n. Uses params.numerics().truncation, or `trunc` when given,
/// or the automatic choice. Throws TruncationError when an explicit
/// truncation leaves a tail above the tolerance.
DiagonalState photon_distribution(const SystemParams& params,
                                  std::optional<std::size_t> trunc = std::nullopt);

MomentReport factorial_moments(const SystemParams& params, int max_order);

enum class TailPolicy {
  /// Throw TruncationError when the last level carries more than 1e-8 of a moment.
  enforce,
  /// The distribution has exactly this support (hand-built states).
  exact_support,
};

/// <a^dag^m a^m> = sum_n n!/(n-m)! p_n.
MomentReport moments_from_distribution(const DiagonalState& state, int max_order,
                                       TailPolicy tail = TailPolicy::enforce);

/// eta * N_a.
double rescaled_photon_number(const SystemParams& params);

struct GridSpec {
  /// Square [-half_width, half_width]^2. Default: max(3, 2 r + 5 / sqrt 2) with r the
  /// limit-cycle radius (0 below threshold), widened to sqrt(N_a + 5 Delta N_a) + 2
  /// when that is larger.
  std::optional<double> half_width;
  std::size_t points = 201;
};

struct WignerField {
  std::vector<double> x;       // column coordinates
  std::vector<double> y;       // row coordinates
  std::vector<double> values;  // row-major, values[iy * x.size() + ix]
  double dx = 0.0;
  double dy = 0.0;
  std::optional<double> mean_field_radius;

  [[nodiscard]] double at(std::size_t ix, std::size_t iy) const { return values[iy * x.size() + ix]; }
  /// Riemann sum of W dx dy.
  [[nodiscard]] double integral() const;
};

/// sqrt((g - kappa) / (2 eta)) above threshold.
std::optional<double> mean_field_radius(const SystemParams& params);

/// W at a single phase-space point.
double wigner_point(const SystemParams& params, std::complex<double> z);

WignerField wigner(const SystemParams& params, const GridSpec& grid = {});

/// Radius of the maximum of W(|z|), found by a scan plus golden-section refinement.
double wigner_ridge_radius(const SystemParams& params);

/// Coherent drive of the g = 0 branch: H = -delta a^dag a + epsilon a^dag + conj(epsilon) a.
class DrivenBranchParams {
 public:
  DrivenBranchParams(double delta, std::complex<double> epsilon);

  [[nodiscard]] double delta() const { return delta_; }
  [[nodiscard]] std::complex<double> epsilon() const { return epsilon_; }
  /// -2 i epsilon / eta
  [[nodiscard]] std::complex<double> c(const SystemParams& params) const;
  /// 2 i (delta + i kappa / 2) / eta
  [[nodiscard]] std::complex<double> d(const SystemParams& params) const;

 private:
  double delta_;
  std::complex<double> epsilon_;
};

/// Normalised Wigner function of the driven g = 0 steady state.
double driven_branch_wigner(const SystemParams& params, const DrivenBranchParams& driven,
                            std::complex<double> z);

WignerField driven_branch_wigner_grid(const SystemParams& params,
                                      const DrivenBranchParams& driven, const GridSpec& grid);

}  // namespace qvdp::exactstate
