#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "qvdp/error.hpp"
#include "qvdp/exactstate.hpp"
#include "qvdp/liouville.hpp"
#include "qvdp/regression.hpp"

using namespace qvdp;
namespace lv = qvdp::liouville;
namespace es = qvdp::exactstate;
using cd = std::complex<double>;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

double nearest(const Eigen::VectorXcd& set, cd v) {
  double best = INFINITY;
  for (Eigen::Index i = 0; i < set.size(); ++i) best = std::min(best, std::abs(set(i) - v));
  return best;
}

}  // namespace

TEST_CASE("build_block: vacuum diagonal and domain") {
  const SystemParams p(0.3, 0.2);
  const auto b = lv::build_block(p, 0, 30);
  CHECK(b.diagonal[0] == doctest::Approx(-0.3).epsilon(1e-15));
  CHECK(b.dimension == 30);
  CHECK(lv::build_block(p, 3, 30).dimension == 27);
  CHECK_THROWS_AS(lv::build_block(p, 3, 7), DomainError);
  CHECK_NOTHROW(lv::build_block(p, 3, 8));
}

TEST_CASE("build_block: coupling coefficients") {
  const SystemParams p(0.7, 0.3, 1.1);
  const int k = 2;
  const auto b = lv::build_block(p, k, 40);
  for (std::size_t n = 1; n + 3 < b.dimension; ++n) {
    const double m = static_cast<double>(n) + k;
    const double nn = static_cast<double>(n);
    CHECK(b.from_lower[n] == doctest::Approx(0.7 * std::sqrt(nn * m)));
    CHECK(b.from_upper1[n] == doctest::Approx(1.1 * std::sqrt((nn + 1) * (m + 1))));
    CHECK(b.from_upper2[n] == doctest::Approx(0.3 * std::sqrt((nn + 1) * (nn + 2) * (m + 1) * (m + 2))));
    const double diag = -(1.1 * (2 * nn + k) / 2 + 0.7 * (2 * nn + k + 2) / 2 +
                          0.3 * (nn * (nn - 1) + m * (m - 1)) / 2);
    CHECK(b.diagonal[n] == doctest::Approx(diag));
  }
}

TEST_CASE("build_block: k = 0 is a generator (zero column sums, nonnegative off-diagonals)") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> ug(0.0, 3.0), ue(0.01, 1.0);
  for (int i = 0; i < 20; ++i) {
    const SystemParams p(ug(rng), ue(rng));
    const auto b = lv::build_block(p, 0, 80);
    for (std::size_t j = 0; j < b.dimension; ++j) CHECK(std::abs(b.column_sum(j)) < 1e-12 * std::max(1.0, std::abs(b.diagonal[j])));
    for (std::size_t n = 0; n < b.dimension; ++n) {
      CHECK(b.from_lower[n] >= 0.0);
      CHECK(b.from_upper1[n] >= 0.0);
      CHECK(b.from_upper2[n] >= 0.0);
    }
  }
}

TEST_CASE("steady_state_oracle examples") {
  const auto vac = lv::steady_state_oracle(SystemParams(1e-12, 0.1), 20);
  CHECK(std::abs(vac.probabilities[0] - 1.0) < 1e-9);
  CHECK(vac.source == es::StateSource::oracle);

  const SystemParams a(0.5, 0.1);
  const auto sa = lv::steady_state_oracle(a, es::auto_truncation(a));
  CHECK(std::abs(es::moments_from_distribution(sa, 2).g2 - es::factorial_moments(a, 2).g2) < 1e-8);

  const SystemParams b(2.0, 0.1);
  const auto sb = lv::steady_state_oracle(b, es::auto_truncation(b));
  CHECK(rel(es::moments_from_distribution(sb, 1).photon_number, es::factorial_moments(b, 1).photon_number) < 1e-8);
}

TEST_CASE("steady_state_oracle equals the closed form on 20 random points") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ug(0.1, 3.0), le(std::log(0.05), std::log(1.0));
  for (int i = 0; i < 20; ++i) {
    const SystemParams p(ug(rng), std::exp(le(rng)));
    const auto closed = es::photon_distribution(p);
    const auto oracle = lv::steady_state_oracle(p, closed.truncation);
    double worst = 0.0;
    for (std::size_t n = 0; n < closed.truncation; ++n) {
      worst = std::max(worst, std::abs(closed.probabilities[n] - oracle.probabilities[n]));
    }
    CAPTURE(p.g());
    CAPTURE(p.eta());
    CHECK(worst < 1e-9);
  }
}

TEST_CASE("dense steady state of the full Liouvillian is diagonal and matches the closed form") {
  const SystemParams p(0.6, 0.4);
  const auto rho = lv::dense_steady_state(p, 16);
  const auto closed = es::photon_distribution(p, 16);
  CHECK(std::abs(rho.trace() - cd(1.0)) < 1e-12);
  for (std::size_t i = 0; i < 16; ++i) {
    CHECK(std::abs(rho.at(i, i).real() - closed.probabilities[i]) < 1e-10);
    for (std::size_t j = 0; j < 16; ++j) {
      if (i != j) CHECK(std::abs(rho.at(i, j)) < 1e-12);
    }
  }
}

TEST_CASE("block spectra reproduce the full Liouvillian spectrum, rotating and lab frame") {
  const std::size_t d = 9;
  for (double omega0 : {0.0, 0.7}) {
    const SystemParams p(0.8, 0.3, 1.0, omega0);
    const auto frame = omega0 == 0.0 ? lv::Frame::rotating : lv::Frame::lab;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> full(lv::full_liouvillian(p, d, frame), false);
    const Eigen::VectorXcd all = full.eigenvalues();
    for (int k = 0; k <= 4; ++k) {
      const auto block = lv::build_block(p, k, d, frame);
      Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es_block(block.to_dense(), false);
      const Eigen::VectorXcd ev = es_block.eigenvalues();
      CHECK(ev.size() == static_cast<Eigen::Index>(d - k));
      for (Eigen::Index i = 0; i < ev.size(); ++i) {
        CHECK(nearest(all, ev(i)) < 1e-10);
        CHECK(nearest(all, std::conj(ev(i))) < 1e-10);
      }
    }
  }
}

TEST_CASE("lab-frame block eigenvalues are the rotating-frame ones shifted by i omega0 k") {
  const SystemParams rot(1.2, 0.25);
  const SystemParams lab(1.2, 0.25, 1.0, 0.9);
  for (int k = 1; k <= 3; ++k) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> a(lv::build_block(rot, k, 14).to_dense(), false);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> b(lv::build_block(lab, k, 14, lv::Frame::lab).to_dense(), false);
    for (Eigen::Index i = 0; i < a.eigenvalues().size(); ++i) {
      CHECK(nearest(b.eigenvalues(), a.eigenvalues()(i) + cd(0.0, 0.9 * k)) < 1e-10);
    }
    const auto ls = lv::leading_eigenvalues(lv::build_block(lab, k, 14, lv::Frame::lab), 2);
    const auto lr = lv::leading_eigenvalues(lv::build_block(rot, k, 14), 2);
    for (std::size_t i = 0; i < 2; ++i) CHECK(std::abs(ls[i] - lr[i] - cd(0.0, 0.9 * k)) < 1e-10);
  }
}

TEST_CASE("shift-invert agrees with the dense solver") {
  for (const auto& p : {SystemParams(0.5, 0.05), SystemParams(1.0, 0.02), SystemParams(2.0, 0.02)}) {
    for (int k : {0, 1, 3}) {
      const auto block = lv::build_block(p, k, 150);
      lv::EigenOptions dense_opt;
      dense_opt.method = lv::EigenMethod::dense;
      lv::EigenOptions si_opt;
      si_opt.method = lv::EigenMethod::shift_invert;
      const auto a = lv::leading_eigenvalues(block, 4, dense_opt);
      const auto b = lv::leading_eigenvalues(block, 4, si_opt);
      REQUIRE(a.size() == 4);
      REQUIRE(b.size() == 4);
      for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(a[i] - b[i]) < 1e-8 * std::max(1.0, std::abs(a[i])));
    }
  }
}

TEST_CASE("rotating-frame k = 1 leading eigenvalues are real") {
  const auto s = lv::asymptotic_decay_rate(SystemParams(1.5, 0.02));
  REQUIRE(s.leading_eigenvalues.size() == 5);
  for (const auto& e : s.leading_eigenvalues[1].eigenvalues) CHECK(std::abs(e.imag()) < 1e-8);
}

TEST_CASE("pure one-photon loss has gap kappa") {
  CHECK(lv::real_dissipative_gap(SystemParams(1e-12, 1e-12)) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("gap-vs-g curve at eta = 0.05 has a single interior minimum near threshold") {
  std::vector<double> gs, gaps;
  for (int i = 0; i <= 30; ++i) {
    gs.push_back(0.5 + 0.05 * i);
    gaps.push_back(lv::real_dissipative_gap(SystemParams(gs.back(), 0.05)));
  }
  const auto imin = static_cast<std::size_t>(std::min_element(gaps.begin(), gaps.end()) - gaps.begin());
  CHECK(imin > 0);
  CHECK(imin < gs.size() - 1);
  for (std::size_t i = 1; i <= imin; ++i) CHECK(gaps[i] < gaps[i - 1]);
  for (std::size_t i = imin + 1; i < gaps.size(); ++i) CHECK(gaps[i] > gaps[i - 1]);
  CHECK(std::abs(gs[imin] - 1.0) < 0.4);
}

TEST_CASE("gap exponent at g = kappa over eta 0.05 .. 0.005") {
  std::vector<double> etas{0.05, 0.02, 0.01, 0.005}, gaps;
  for (double e : etas) gaps.push_back(lv::real_dissipative_gap(SystemParams(1.0, e)));
  CHECK(std::abs(regression::log_log_fit(etas, gaps).slope - 0.5) < 0.05);
}

TEST_CASE("spectral summary invariants and truncation robustness") {
  for (const auto& p : {SystemParams(0.5, 0.05), SystemParams(1.0, 0.01), SystemParams(2.0, 0.01)}) {
    const auto s = lv::asymptotic_decay_rate(p);
    CHECK(s.rdg > 0.0);
    CHECK(s.adr > 0.0);
    CHECK(s.adr <= s.rdg + 1e-12);
    CHECK(s.relaxation_time == doctest::Approx(1.0 / s.adr));
    CHECK(s.rdg == doctest::Approx(lv::real_dissipative_gap(p, s.truncation)).epsilon(1e-12));
    const auto wide = lv::asymptotic_decay_rate(p, 2 * s.truncation);
    CHECK(rel(wide.rdg, s.rdg) < 1e-8);
    CHECK(rel(wide.adr, s.adr) < 1e-8);
  }
  CHECK_THROWS_AS(lv::asymptotic_decay_rate(SystemParams(1.0, 0.1), std::nullopt, 0), DomainError);
}

TEST_CASE("wigner_at_origin of the vacuum") {
  lv::DensityMatrix rho{2, {1.0, 0.0, 0.0, 0.0}};
  CHECK(lv::wigner_at_origin(rho) == doctest::Approx(2.0 / M_PI));
}
