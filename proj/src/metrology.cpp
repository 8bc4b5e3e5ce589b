#include "qvdp/metrology.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "compensated.hpp"
#include "parallel.hpp"
#include "qvdp/error.hpp"
#include "qvdp/exactstate.hpp"

namespace qvdp::metrology {

namespace {

// Distribution at g and its g-derivative, on one truncation.
struct Derivative {
  std::vector<double> p;
  std::vector<double> dp;       // Richardson combination
  std::vector<double> dp_half;  // central difference at step h / 2
  double step = 0.0;
  std::size_t truncation = 0;
};

Derivative differentiate(const SystemParams& params, const DifferenceOptions& opt) {
  if (!(params.g() > 0.0)) throw DomainError("metrology: requires g > 0");
  if (!(opt.step > 0.0)) throw DomainError("metrology: step must be > 0");
  const double h = std::min(opt.step * params.kappa(), params.g() / 2.0);
  const std::array<double, 5> gs{params.g(), params.g() + h, params.g() - h, params.g() + h / 2.0,
                                 params.g() - h / 2.0};

  std::size_t trunc = 0;
  if (params.numerics().truncation) {
    trunc = *params.numerics().truncation;
  } else {
    std::array<std::size_t, 5> autos{};
    detail::parallel_for(gs.size(), [&](std::size_t i) {
      autos[i] = exactstate::auto_truncation(params.with_g(gs[i]));
    });
    trunc = *std::max_element(autos.begin(), autos.end());
  }

  std::array<std::vector<double>, 5> dist;
  detail::parallel_for(gs.size(), [&](std::size_t i) {
    dist[i] = exactstate::photon_distribution(params.with_g(gs[i]), trunc).probabilities;
  });

  Derivative d;
  d.step = h;
  d.truncation = trunc;
  d.p = std::move(dist[0]);
  d.dp.resize(trunc);
  d.dp_half.resize(trunc);
  for (std::size_t n = 0; n < trunc; ++n) {
    const double full = (dist[1][n] - dist[2][n]) / (2.0 * h);
    const double half = (dist[3][n] - dist[4][n]) / h;
    d.dp_half[n] = half;
    d.dp[n] = (4.0 * half - full) / 3.0;
  }
  return d;
}

struct ObservableStats {
  double mean;
  double variance;
  double slope;       // d<O>/dg, Richardson
  double slope_half;  // d<O>/dg at the half step
};

ObservableStats observable_stats(const Derivative& d, const DiagonalObservable& w) {
  detail::CompensatedSum mean;
  for (std::size_t n = 0; n < d.p.size(); ++n) mean.add(w(n) * d.p[n]);
  const double m = mean.value();
  detail::CompensatedSum var;
  detail::CompensatedSum slope;
  detail::CompensatedSum slope_half;
  for (std::size_t n = 0; n < d.p.size(); ++n) {
    const double wn = w(n);
    var.add((wn - m) * (wn - m) * d.p[n]);
    slope.add(wn * d.dp[n]);
    slope_half.add(wn * d.dp_half[n]);
  }
  return {m, var.value(), slope.value(), slope_half.value()};
}

double signal_to_noise(const ObservableStats& s) {
  if (!(s.variance >= 1e-30)) {
    throw ZeroVarianceError("snr: observable variance " + std::to_string(s.variance) +
                            " is below 1e-30");
  }
  return s.slope * s.slope / s.variance;
}

struct FisherSum {
  double value;
  double discarded_mass;
};

FisherSum fisher(const Derivative& d, double floor) {
  detail::CompensatedSum f;
  detail::CompensatedSum dropped;
  for (std::size_t n = 0; n < d.p.size(); ++n) {
    if (d.p[n] >= floor) {
      f.add(d.dp[n] * d.dp[n] / d.p[n]);
    } else {
      dropped.add(d.p[n]);
    }
  }
  return {f.value(), dropped.value()};
}

}  // namespace

DiagonalObservable photon_number_observable() {
  return [](std::size_t n) { return static_cast<double>(n); };
}

MetrologyReport analyze(const SystemParams& params, const DifferenceOptions& opt) {
  const auto d = differentiate(params, opt);
  const auto stats = observable_stats(d, photon_number_observable());
  const auto f = fisher(d, opt.probability_floor);
  MetrologyReport r;
  r.qfi = f.value;
  r.discarded_mass = f.discarded_mass;
  r.snr_photon = signal_to_noise(stats);
  r.susceptibility = stats.slope;
  r.photon_std = std::sqrt(stats.variance);
  r.photon_number = stats.mean;
  r.fd_step = d.step;
  r.richardson_error_estimate = std::abs(stats.slope - stats.slope_half);
  r.truncation = d.truncation;
  return r;
}

double snr(const SystemParams& params, const DiagonalObservable& observable,
           const DifferenceOptions& opt) {
  if (!observable) throw DomainError("snr: empty observable");
  return signal_to_noise(observable_stats(differentiate(params, opt), observable));
}

double qfi(const SystemParams& params, const DifferenceOptions& opt) {
  return fisher(differentiate(params, opt), opt.probability_floor).value;
}

double optimality_gap(const SystemParams& params, const DifferenceOptions& opt) {
  const auto r = analyze(params, opt);
  return std::abs(r.qfi - r.snr_photon) / r.qfi;
}

const char* to_string(ScalingClass kind) {
  switch (kind) {
    case ScalingClass::heisenberg:
      return "heisenberg";
    case ScalingClass::standard_quantum:
      return "standard_quantum";
    case ScalingClass::unclassified:
      return "unclassified";
  }
  return "?";
}

ScalingClassification scaling_classification(std::span<const double> photon_numbers,
                                             std::span<const double> qfis) {
  if (photon_numbers.size() < 5) {
    throw InsufficientPointsError("scaling_classification: need at least 5 sweep points, got " +
                                  std::to_string(photon_numbers.size()));
  }
  ScalingClassification c;
  c.fit = regression::log_log_fit(photon_numbers, qfis, 5);
  c.exponent = c.fit.slope;
  if (std::abs(c.exponent - 2.0) <= 0.1) {
    c.kind = ScalingClass::heisenberg;
  } else if (std::abs(c.exponent - 1.0) <= 0.1) {
    c.kind = ScalingClass::standard_quantum;
  }
  return c;
}

ScalingClassification scaling_classification(const SystemParams& fixed,
                                             std::span<const double> eta_values,
                                             const DifferenceOptions& opt) {
  if (eta_values.size() < 5) {
    throw InsufficientPointsError("scaling_classification: need at least 5 eta values, got " +
                                  std::to_string(eta_values.size()));
  }
  std::vector<double> na(eta_values.size());
  std::vector<double> f(eta_values.size());
  detail::parallel_for(eta_values.size(), [&](std::size_t i) {
    const auto r = analyze(fixed.with_eta(eta_values[i]), opt);
    na[i] = r.photon_number;
    f[i] = r.qfi;
  });
  return scaling_classification(na, f);
}

}  // namespace qvdp::metrology
