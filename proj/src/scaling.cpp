#include "qvdp/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "parallel.hpp"
#include "qvdp/error.hpp"
#include "qvdp/exactstate.hpp"
#include "qvdp/liouville.hpp"
#include "qvdp/metrology.hpp"
#include "qvdp/regression.hpp"

namespace qvdp::scaling {

namespace {

constexpr std::array<const char*, kObservableCount> kObservableNames{
    "Na", "eta_Na", "dNa_dg", "std_Na", "g2", "qfi", "snr", "rdg", "adr", "T"};

bool wants(std::span<const Observable> obs, std::initializer_list<Observable> any) {
  for (auto o : obs) {
    for (auto a : any) {
      if (o == a) return true;
    }
  }
  return false;
}

void set(SweepRecord& r, Observable o, double v) { r.observables[static_cast<std::size_t>(o)] = v; }

void evaluate(SweepRecord& r, std::span<const Observable> obs, const SweepOptions& opt) {
  using O = Observable;
  const auto& p = r.params;
  if (wants(obs, {O::Na, O::eta_Na, O::std_Na, O::g2})) {
    const auto m = exactstate::factorial_moments(p, 2);
    set(r, O::Na, m.photon_number);
    set(r, O::eta_Na, p.eta() * m.photon_number);
    set(r, O::std_Na, m.photon_std);
    set(r, O::g2, m.g2);
  }
  if (wants(obs, {O::dNa_dg, O::qfi, O::snr})) {
    const auto m = metrology::analyze(p);
    set(r, O::dNa_dg, m.susceptibility);
    set(r, O::qfi, m.qfi);
    set(r, O::snr, m.snr_photon);
  }
  if (wants(obs, {O::rdg, O::adr, O::T})) {
    const auto s = liouville::asymptotic_decay_rate(p);
    if (opt.truncation_check) {
      const auto wider = liouville::asymptotic_decay_rate(p, s.truncation + s.truncation / 2);
      const double drift = std::max(std::abs(wider.rdg / s.rdg - 1.0), std::abs(wider.adr / s.adr - 1.0));
      if (drift > 1e-8) {
        throw TruncationError("spectral observables moved by " + std::to_string(drift) +
                              " relative under a 1.5x truncation");
      }
    }
    set(r, O::rdg, s.rdg);
    set(r, O::adr, s.adr);
    set(r, O::T, s.relaxation_time);
  }
  // Keep only what was asked for.
  for (std::size_t i = 0; i < kObservableCount; ++i) {
    if (!wants(obs, {static_cast<O>(i)})) r.observables[i].reset();
  }
}

std::optional<double> x_value(const SweepRecord& r, XVariable x) {
  switch (x) {
    case XVariable::eta:
      return r.params.eta();
    case XVariable::delta_g:
      return r.params.delta_g();
    case XVariable::Na:
      return r.get(Observable::Na);
    case XVariable::T:
      return r.get(Observable::T);
  }
  return std::nullopt;
}

}  // namespace

const char* to_string(Observable obs) { return kObservableNames[static_cast<std::size_t>(obs)]; }

Observable observable_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kObservableCount; ++i) {
    if (name == kObservableNames[i]) return static_cast<Observable>(i);
  }
  throw DomainError("unknown observable '" + std::string(name) + "'");
}

const char* to_string(Axis axis) { return axis == Axis::g ? "g" : "eta"; }

Axis axis_from_string(std::string_view name) {
  if (name == "g") return Axis::g;
  if (name == "eta") return Axis::eta;
  throw DomainError("unknown sweep axis '" + std::string(name) + "' (expected g or eta)");
}

const char* to_string(XVariable x) {
  switch (x) {
    case XVariable::eta:
      return "eta";
    case XVariable::delta_g:
      return "delta_g";
    case XVariable::Na:
      return "Na";
    case XVariable::T:
      return "T";
  }
  return "?";
}

XVariable x_variable_from_string(std::string_view name) {
  if (name == "eta") return XVariable::eta;
  if (name == "delta_g") return XVariable::delta_g;
  if (name == "Na") return XVariable::Na;
  if (name == "T") return XVariable::T;
  throw DomainError("unknown fit variable '" + std::string(name) + "'");
}

std::vector<SweepRecord> sweep(Axis axis, std::span<const double> values,
                               const SystemParams& fixed, std::span<const Observable> observables,
                               const SweepOptions& opt) {
  if (values.empty()) throw DomainError("sweep: no values");
  if (observables.empty()) throw DomainError("sweep: no observables requested");
  if (values.size() > 1) {
    const bool up = values[1] > values[0];
    for (std::size_t i = 1; i < values.size(); ++i) {
      if (up ? !(values[i] > values[i - 1]) : !(values[i] < values[i - 1])) {
        throw DomainError("sweep: values must be strictly monotone");
      }
    }
  }
  std::vector<SweepRecord> records;
  records.reserve(values.size());
  for (double v : values) {
    SweepRecord r{axis == Axis::g ? fixed.with_g(v) : fixed.with_eta(v), {}, true, {}};
    records.push_back(std::move(r));
  }
  detail::parallel_for(records.size(), [&](std::size_t i) {
    auto& r = records[i];
    try {
      evaluate(r, observables, opt);
    } catch (const std::exception& e) {
      r.ok = false;
      r.failure = e.what();
      r.observables = {};
    }
  });
  return records;
}

FitResult fit_exponent(std::span<const SweepRecord> records, XVariable x, Observable y,
                       std::optional<double> reference, double tolerance) {
  FitResult f;
  f.reference_exponent = reference;
  f.tolerance = tolerance;
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (!r.ok) {
      f.exclusions.push_back({i, "kernel failure: " + r.failure});
      continue;
    }
    const auto xv = x_value(r, x);
    const auto yv = r.get(y);
    if (!xv || !yv) {
      f.exclusions.push_back({i, std::string("missing ") + (!xv ? to_string(x) : to_string(y))});
      continue;
    }
    xs.push_back(*xv);
    ys.push_back(*yv);
  }
  const auto lf = regression::log_log_fit(xs, ys, 3);
  f.exponent = lf.slope;
  f.intercept = lf.intercept;
  f.r_squared = lf.r_squared;
  f.stderr_exponent = lf.slope_stderr;
  f.n_points = lf.n_points;
  f.within_tolerance = reference && std::abs(f.exponent - *reference) <= tolerance;
  return f;
}

std::vector<Observable> table1_columns(bool include_T) {
  std::vector<Observable> cols{Observable::dNa_dg, Observable::std_Na, Observable::snr,
                               Observable::Na};
  if (include_T) cols.push_back(Observable::T);
  return cols;
}

Table1Report table1_report(std::span<const double> eta_values, double g_critical,
                           double g_time_crystal, bool include_T, const SystemParams& base) {
  if (eta_values.size() < 5) {
    throw InsufficientPointsError("table1_report: need at least 5 eta values");
  }
  const auto [lo, hi] = std::minmax_element(eta_values.begin(), eta_values.end());
  if (*hi / *lo < 10.0 * (1.0 - 1e-12)) {
    throw DomainError("table1_report: eta values must span at least one decade");
  }
  const auto cols = table1_columns(include_T);
  const std::array<double, 5> crit_ref{-1.0, -0.5, -1.0, -0.5, -0.5};
  const std::array<double, 5> tc_ref{-1.0, -0.5, -1.0, -1.0, -1.0};

  Table1Report rep;
  rep.eta_values.assign(eta_values.begin(), eta_values.end());
  rep.includes_T = include_T;
  auto row = [&](double g, const std::array<double, 5>& ref) {
    Table1Row r;
    r.g = g;
    const auto recs = sweep(Axis::eta, eta_values, base.with_g(g), cols);
    for (std::size_t c = 0; c < cols.size(); ++c) {
      r.fits.push_back(fit_exponent(recs, XVariable::eta, cols[c], ref[c], 0.05));
    }
    return r;
  };
  rep.critical = row(g_critical, crit_ref);
  rep.time_crystal = row(g_time_crystal, tc_ref);
  return rep;
}

GapMinimum gap_minimum(const SystemParams& base, double g_lo, double g_hi, double step) {
  if (!(step > 0.0) || !(g_hi > g_lo) || !(g_lo >= 0.0)) {
    throw DomainError("gap_minimum: need 0 <= g_lo < g_hi and step > 0");
  }
  const auto count = static_cast<std::size_t>(std::floor((g_hi - g_lo) / step + 1e-9)) + 1;
  if (count < 3) throw DomainError("gap_minimum: grid needs at least three points");
  std::vector<double> gaps(count);
  detail::parallel_for(count, [&](std::size_t i) {
    gaps[i] = liouville::real_dissipative_gap(base.with_g(g_lo + step * static_cast<double>(i)));
  });

  GapMinimum out;
  for (std::size_t i = 1; i + 1 < count; ++i) {
    if (gaps[i] < gaps[i - 1] && gaps[i] < gaps[i + 1]) ++out.interior_minima;
  }
  const auto i = static_cast<std::size_t>(std::min_element(gaps.begin(), gaps.end()) - gaps.begin());
  out.g = g_lo + step * static_cast<double>(i);
  out.rdg = gaps[i];
  if (out.interior_minima == 1 && i > 0 && i + 1 < count) {
    const double y0 = gaps[i - 1], y1 = gaps[i], y2 = gaps[i + 1];
    const double curv = y0 - 2.0 * y1 + y2;
    const double shift = 0.5 * (y0 - y2) / curv;
    out.g += step * shift;
    out.rdg = y1 - 0.25 * (y0 - y2) * shift;
  }
  return out;
}

}  // namespace qvdp::scaling
