#include <doctest.h>

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "qvdp/banded.hpp"
#include "qvdp/error.hpp"

using qvdp::linalg::BandedLU;
using qvdp::linalg::BandedMatrix;

namespace {

BandedMatrix random_band(std::size_t n, std::size_t kl, std::size_t ku, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  BandedMatrix a(n, kl, ku);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= kl ? i - kl : 0;
    const std::size_t hi = std::min(n - 1, i + ku);
    for (std::size_t j = lo; j <= hi; ++j) a.set(i, j, u(rng));
  }
  return a;
}

Eigen::MatrixXd dense(const BandedMatrix& a) {
  Eigen::MatrixXd d(a.size(), a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a.size(); ++j) d(i, j) = a.get(i, j);
  }
  return d;
}

}  // namespace

TEST_CASE("band storage get/set/multiply") {
  BandedMatrix a(5, 1, 2);
  a.set(0, 0, 1.0);
  a.set(0, 2, 3.0);
  a.set(3, 2, -2.0);
  CHECK(a.get(0, 2) == 3.0);
  CHECK(a.get(3, 2) == -2.0);
  CHECK(a.get(4, 0) == 0.0);
  CHECK_THROWS_AS(a.set(4, 0, 1.0), qvdp::DomainError);
  a.add_diagonal(0.5);
  CHECK(a.get(0, 0) == 1.5);
  CHECK(a.get(2, 2) == 0.5);

  std::vector<double> x{1, 2, 3, 4, 5}, y(5);
  a.multiply(x, y);
  const Eigen::VectorXd ref = dense(a) * Eigen::Map<Eigen::VectorXd>(x.data(), 5);
  for (int i = 0; i < 5; ++i) CHECK(y[static_cast<std::size_t>(i)] == doctest::Approx(ref(i)));
}

TEST_CASE("banded LU solves against a dense reference") {
  std::mt19937_64 rng(1);
  for (std::size_t n : {5u, 17u, 200u}) {
    for (auto [kl, ku] : {std::pair<std::size_t, std::size_t>{1, 2}, {2, 1}, {3, 3}}) {
      const auto a = random_band(n, kl, ku, rng);
      const Eigen::MatrixXd d = dense(a);
      Eigen::VectorXd b = Eigen::VectorXd::Random(static_cast<Eigen::Index>(n));
      std::vector<double> x(b.data(), b.data() + n);
      BandedLU lu(a);
      lu.solve(x);
      const Eigen::VectorXd ref = d.partialPivLu().solve(b);
      for (std::size_t i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(ref(static_cast<Eigen::Index>(i))).epsilon(1e-8));
      CHECK(lu.pivot_ratio() > 0.0);
      CHECK(lu.pivot_ratio() <= 1.0);
    }
  }
}

TEST_CASE("banded LU pivots past a zero leading entry") {
  BandedMatrix a(3, 1, 1);
  a.set(0, 1, 1.0);
  a.set(1, 0, 1.0);
  a.set(1, 2, 2.0);
  a.set(2, 1, 3.0);
  a.set(2, 2, 1.0);
  std::vector<double> x{1.0, 5.0, 7.0};
  BandedLU(a).solve(x);
  CHECK(x[0] == doctest::Approx(-3.0));
  CHECK(x[1] == doctest::Approx(1.0));
  CHECK(x[2] == doctest::Approx(4.0));
}

TEST_CASE("banded LU reports a singular matrix") {
  BandedMatrix a(3, 1, 1);
  a.set(0, 0, 1.0);
  a.set(1, 1, 0.0);
  a.set(2, 2, 1.0);
  CHECK_THROWS_AS(BandedLU{a}, qvdp::SingularError);
}
