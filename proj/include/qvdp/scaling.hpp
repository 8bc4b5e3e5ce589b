#pragma once

// Parameter sweeps and log-log exponent fits.

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qvdp/params.hpp"

namespace qvdp::scaling {

enum class Axis { g, eta };

enum class Observable { Na, eta_Na, dNa_dg, std_Na, g2, qfi, snr, rdg, adr, T };

inline constexpr std::size_t kObservableCount = 10;

const char* to_string(Observable obs);
/// Throws DomainError for an unknown name.
Observable observable_from_string(std::string_view name);
const char* to_string(Axis axis);
Axis axis_from_string(std::string_view name);

struct SweepRecord {
  SystemParams params;
  std::array<std::optional<double>, kObservableCount> observables{};
  bool ok = true;
  std::string failure;

  [[nodiscard]] std::optional<double> get(Observable obs) const {
    return observables[static_cast<std::size_t>(obs)];
  }
};

struct SweepOptions {
  /// Recompute spectral observables with 1.5x the truncation and fail the point
  /// when they move by more than 1e-8 relative.
  bool truncation_check = false;
};

/// One record per value, in input order. Kernel failures are stored in the
/// record. Throws DomainError for empty or non-monotone values or invalid params.
std::vector<SweepRecord> sweep(Axis axis, std::span<const double> values,
                               const SystemParams& fixed, std::span<const Observable> observables,
                               const SweepOptions& options = {});

/// Abscissa of an exponent fit.
enum class XVariable { eta, delta_g, Na, T };

const char* to_string(XVariable x);
XVariable x_variable_from_string(std::string_view name);

struct Exclusion {
  std::size_t index;
  std::string reason;
};

struct FitResult {
  double exponent = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double stderr_exponent = 0.0;
  std::size_t n_points = 0;
  std::optional<double> reference_exponent;
  double tolerance = 0.1;
  /// |exponent - reference| <= tolerance; false without a reference.
  bool within_tolerance = false;
  /// Records left out of the fit, by sweep index.
  std::vector<Exclusion> exclusions;
};

/// Least-squares slope of log y against log x over the usable records.
/// Throws InsufficientPointsError below three usable records and
/// NonPositiveValueError for x or y <= 0.
FitResult fit_exponent(std::span<const SweepRecord> records, XVariable x, Observable y,
                       std::optional<double> reference = std::nullopt, double tolerance = 0.1);

struct Table1Row {
  double g = 0.0;
  /// d N_a / dg, Delta N_a, S_g, N_a, then T when requested.
  std::vector<FitResult> fits;
};

struct Table1Report {
  std::vector<double> eta_values;
  Table1Row critical;
  Table1Row time_crystal;
  bool includes_T = false;
};

/// Column order of a Table1Row.
std::vector<Observable> table1_columns(bool include_T);

/// eta exponents at g_critical and g_time_crystal (kappa from `base`), compared
/// against (-1, -1/2, -1, -1/2, -1/2) and (-1, -1/2, -1, -1, -1) with
/// tolerance 0.05. Needs at least five eta values spanning a decade.
Table1Report table1_report(std::span<const double> eta_values, double g_critical,
                           double g_time_crystal, bool include_T = true,
                           const SystemParams& base = SystemParams(1.0, 1.0));

struct GapMinimum {
  double g = NAN;
  double rdg = NAN;
  /// Strict interior local minima on the grid; the location is refined only when this is 1.
  std::size_t interior_minima = 0;
};

/// Minimum over g of the real dissipative gap at fixed eta and kappa: evaluation on
/// g_lo, g_lo + step, ... <= g_hi, then a parabola through the lowest grid point and
/// its neighbours. Throws DomainError for an empty or too short grid.
GapMinimum gap_minimum(const SystemParams& base, double g_lo, double g_hi, double step);

}  // namespace qvdp::scaling
