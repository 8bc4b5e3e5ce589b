#pragma once

// Truncated Fock-space Liouvillian of the van der Pol master equation.
// The generator splits into blocks of fixed offset k acting on rho_{n, n+k};
// only k >= 0 is built since block -k is the complex conjugate of block k.

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "qvdp/banded.hpp"
#include "qvdp/exactstate.hpp"
#include "qvdp/params.hpp"

namespace qvdp::liouville {

enum class Frame { rotating, lab };

/// Block of the generator for offset k. Row n holds the equation for
/// rho_{n, n+k}, n = 0 .. dimension-1.
struct BlockGenerator {
  int offset_k = 0;
  std::size_t dimension = 0;
  std::size_t truncation = 0;
  /// Coupling of row n to rho_{n-1, n-1+k}; entry 0 unused.
  std::vector<double> from_lower;
  std::vector<double> diagonal;
  /// Couplings to rho_{n+1, n+1+k} and rho_{n+2, n+2+k}; trailing entries unused.
  std::vector<double> from_upper1;
  std::vector<double> from_upper2;
  Frame frame = Frame::rotating;
  /// Imaginary part added to every diagonal entry: omega0 * k in the lab frame, else 0.
  double imag_shift = 0.0;
  /// Log of the diagonal similarity applied before eigensolves; empty means none.
  /// Eigenvalues are unchanged, but the balanced block is much closer to normal.
  std::vector<double> log_balance;

  /// Real part of the block in band storage (kl = 1, ku = 2).
  [[nodiscard]] linalg::BandedMatrix banded() const;
  /// Full complex block including the lab-frame shift.
  [[nodiscard]] Eigen::MatrixXcd to_dense() const;
  /// Sum of column j of the real part.
  [[nodiscard]] double column_sum(std::size_t j) const;
};

/// Throws DomainError unless trunc > k + 4.
BlockGenerator build_block(const SystemParams& params, int k, std::size_t trunc,
                           Frame frame = Frame::rotating);

/// Kernel of the k = 0 block with the normalisation sum p_n = 1 in place of the
/// vacuum equation. Throws SingularError when the reduced system is numerically
/// rank deficient.
exactstate::DiagonalState steady_state_oracle(const SystemParams& params, std::size_t trunc);

enum class EigenMethod {
  /// Shift-invert Arnoldi; the dense solver takes over when that fails and the
  /// dimension is at most dense_limit.
  automatic,
  dense,
  shift_invert,
};

struct EigenOptions {
  EigenMethod method = EigenMethod::automatic;
  std::size_t dense_limit = 400;
  /// Positive real shift. The gap and decay-rate routines multiply it by kappa.
  double shift = 0.05;
  /// Ritz residual tolerance relative to the Ritz value of the inverse.
  double tolerance = 1e-12;
};

/// The `count` eigenvalues of the block nearest zero (largest real part for a
/// real spectrum), sorted by real part, largest first.
std::vector<std::complex<double>> leading_eigenvalues(const BlockGenerator& block,
                                                      std::size_t count,
                                                      const EigenOptions& options = {});

/// Fock levels used for spectra when no truncation is given: the automatic
/// steady-state truncation plus a margin.
std::size_t spectral_truncation(const SystemParams& params);

/// Minus the largest real part among the nonzero eigenvalues of the k = 0 block.
/// Throws ZeroModeError if the smallest |lambda| is not below 1e-10 kappa.
double real_dissipative_gap(const SystemParams& params,
                            std::optional<std::size_t> trunc = std::nullopt,
                            const EigenOptions& options = {});

struct BlockSpectrum {
  int k = 0;
  std::vector<std::complex<double>> eigenvalues;
};

struct SpectralSummary {
  double rdg = 0.0;
  double adr = 0.0;
  std::vector<BlockSpectrum> leading_eigenvalues;  // ordered by k
  int adr_block = 0;
  /// 1 / adr
  double relaxation_time = 0.0;
  std::size_t truncation = 0;
};

/// Smallest decay rate over blocks k = 0 .. k_max, the k = 0 zero mode excluded.
SpectralSummary asymptotic_decay_rate(const SystemParams& params,
                                      std::optional<std::size_t> trunc = std::nullopt,
                                      int k_max = 4, const EigenOptions& options = {});

/// Row-major D x D matrix.
struct DensityMatrix {
  std::size_t dimension = 0;
  std::vector<std::complex<double>> values;

  [[nodiscard]] std::complex<double> at(std::size_t i, std::size_t j) const {
    return values[i * dimension + j];
  }
  [[nodiscard]] std::complex<double> trace() const;
};

/// Full D^2 x D^2 Liouvillian on row-major vec(rho), built from operators
/// independently of the block formulas. Includes -delta a^dag a + epsilon a^dag
/// + h.c. when a drive is given, and omega0 a^dag a in the lab frame.
Eigen::MatrixXcd full_liouvillian(const SystemParams& params, std::size_t trunc, Frame frame,
                                  const std::optional<exactstate::DrivenBranchParams>& drive =
                                      std::nullopt);

/// Steady state of the full Liouvillian by dense LU with the trace condition
/// replacing one equation. Intended for small truncations.
DensityMatrix dense_steady_state(const SystemParams& params, std::size_t trunc,
                                 const std::optional<exactstate::DrivenBranchParams>& drive =
                                     std::nullopt);

/// W(0) = (2 / pi) Tr[rho (-1)^{a^dag a}].
double wigner_at_origin(const DensityMatrix& rho);

}  // namespace qvdp::liouville
