#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "qvdp/error.hpp"
#include "qvdp/regression.hpp"

namespace rg = qvdp::regression;

TEST_CASE("exact line") {
  const std::vector<double> x{1, 2, 3, 4}, y{3, 5, 7, 9};
  const auto f = rg::linear_fit(x, y);
  CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(f.intercept == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(f.r_squared == doctest::Approx(1.0));
  CHECK(f.slope_stderr < 1e-14);
  CHECK(f.n_points == 4);
}

TEST_CASE("power law y = x^3") {
  std::vector<double> x, y;
  for (double v = 0.5; v < 40.0; v *= 1.6) {
    x.push_back(v);
    y.push_back(v * v * v);
  }
  const auto f = rg::log_log_fit(x, y);
  CHECK(std::abs(f.slope - 3.0) < 1e-12);
  CHECK(f.r_squared == doctest::Approx(1.0));
}

TEST_CASE("noisy fit: slope standard error matches the textbook formula") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> noise(0.0, 0.1);
  std::vector<double> x, y;
  for (int i = 0; i < 50; ++i) {
    x.push_back(i * 0.1);
    y.push_back(0.7 * i * 0.1 - 2.0 + noise(rng));
  }
  const auto f = rg::linear_fit(x, y);
  double mx = 0, my = 0;
  for (int i = 0; i < 50; ++i) {
    mx += x[i] / 50;
    my += y[i] / 50;
  }
  double sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < 50; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  const double b = sxy / sxx;
  const double rss = syy - b * sxy;
  CHECK(f.slope == doctest::Approx(b).epsilon(1e-12));
  CHECK(f.slope_stderr == doctest::Approx(std::sqrt(rss / 48.0 / sxx)).epsilon(1e-9));
  CHECK(f.r_squared == doctest::Approx(1.0 - rss / syy).epsilon(1e-9));
  CHECK(f.r_squared >= 0.0);
  CHECK(f.r_squared <= 1.0);
}

TEST_CASE("errors") {
  const std::vector<double> one{1.0};
  CHECK_THROWS_AS(rg::linear_fit(one, one), qvdp::InsufficientPointsError);
  const std::vector<double> x{1, 2, 3}, y{1, 2, 3};
  CHECK_THROWS_AS(rg::linear_fit(x, y, 4), qvdp::InsufficientPointsError);
  const std::vector<double> flat{2, 2, 2};
  CHECK_THROWS_AS(rg::linear_fit(flat, y), qvdp::DomainError);
  const std::vector<double> neg{1, -2, 3};
  CHECK_THROWS_AS(rg::log_log_fit(x, neg), qvdp::NonPositiveValueError);
  CHECK_THROWS_AS(rg::log_log_fit(neg, y), qvdp::NonPositiveValueError);
  const std::vector<double> short_y{1, 2};
  CHECK_THROWS_AS(rg::linear_fit(x, short_y), qvdp::DomainError);
}
