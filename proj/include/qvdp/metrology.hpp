#pragma once

// Estimation of the pump rate g from the steady state: signal-to-noise ratios
// of diagonal observables and the quantum Fisher information of the diagonal
// state. Derivatives in g are central differences with one Richardson level.

#include <cstddef>
#include <functional>
#include <span>

#include "qvdp/params.hpp"
#include "qvdp/regression.hpp"

namespace qvdp::metrology {

/// Observable diagonal in the Fock basis, n -> w_n.
using DiagonalObservable = std::function<double(std::size_t)>;

/// w_n = n
DiagonalObservable photon_number_observable();

struct DifferenceOptions {
  /// Base step delta in units of kappa; steps delta and delta / 2 are combined.
  /// Shrunk to g / 2 when g is smaller.
  double step = 1e-4;
  /// Probability floor for the Fisher-information terms.
  double probability_floor = 1e-14;
};

struct MetrologyReport {
  double qfi = 0.0;
  double snr_photon = 0.0;
  /// d N_a / dg
  double susceptibility = 0.0;
  double photon_std = 0.0;
  double photon_number = 0.0;
  /// Base step actually used.
  double fd_step = 0.0;
  /// |Richardson value - central difference at the half step| for d N_a / dg.
  double richardson_error_estimate = 0.0;
  /// Probability mass excluded from the Fisher sum by the floor.
  double discarded_mass = 0.0;
  /// Common truncation of all neighbouring distributions.
  std::size_t truncation = 0;
};

MetrologyReport analyze(const SystemParams& params, const DifferenceOptions& options = {});

/// |d<O>/dg|^2 / Var(O). Throws ZeroVarianceError when Var(O) < 1e-30.
double snr(const SystemParams& params, const DiagonalObservable& observable,
           const DifferenceOptions& options = {});

/// sum_n (dp_n/dg)^2 / p_n over p_n above the floor.
double qfi(const SystemParams& params, const DifferenceOptions& options = {});

/// |F_g - S_g(N_a)| / F_g
double optimality_gap(const SystemParams& params, const DifferenceOptions& options = {});

enum class ScalingClass { heisenberg, standard_quantum, unclassified };

const char* to_string(ScalingClass kind);

struct ScalingClassification {
  ScalingClass kind = ScalingClass::unclassified;
  /// Slope of log F_g against log N_a.
  double exponent = 0.0;
  regression::LinearFit fit;
};

/// Classifies the exponent: 2 +- 0.1 Heisenberg, 1 +- 0.1 standard quantum limit.
/// Throws InsufficientPointsError below five points.
ScalingClassification scaling_classification(std::span<const double> photon_numbers,
                                             std::span<const double> qfis);

/// Sweeps eta at fixed g and kappa of `fixed`, then classifies.
ScalingClassification scaling_classification(const SystemParams& fixed,
                                             std::span<const double> eta_values,
                                             const DifferenceOptions& options = {});

}  // namespace qvdp::metrology
