#include <doctest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <complex>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qvdp/error.hpp"
#include "qvdp/specialfn.hpp"

namespace sf = qvdp::specialfn;
namespace mp = boost::multiprecision;

using Big = mp::number<mp::cpp_bin_float<200>>;
using Mid = mp::number<mp::cpp_bin_float<80>>;

namespace {

// Direct real pFq summation in high precision.
template <class T>
T series(const std::vector<double>& num, const std::vector<double>& den, const T& z) {
  T term = 1;
  T sum = 1;
  const T eps = std::numeric_limits<T>::epsilon();
  for (int k = 0; k < 10'000'000; ++k) {
    T ratio = z / (k + 1);
    for (double a : num) ratio *= T(a) + k;
    for (double b : den) ratio /= T(b) + k;
    term *= ratio;
    sum += term;
    if (k > 200 && abs(ratio) < 1 && abs(term) < eps * abs(sum)) break;
  }
  return sum;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::vector<std::complex<double>> parse_complex_list(const std::string& text) {
  std::istringstream in(text);
  std::vector<double> flat;
  double v;
  while (in >> v) flat.push_back(v);
  std::vector<std::complex<double>> out;
  for (std::size_t i = 0; i + 1 < flat.size(); i += 2) out.emplace_back(flat[i], flat[i + 1]);
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

}  // namespace

TEST_CASE("log_gamma examples") {
  CHECK(sf::log_gamma(1.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(std::abs(sf::log_gamma(0.5) - 0.57236494292470008707) < 1e-14);

  mp::cpp_int f = 1;
  for (int i = 2; i <= 170; ++i) f *= i;
  const double exact = static_cast<double>(log(Big(f)));
  CHECK(rel(sf::log_gamma(171.0), exact) < 1e-13);

  CHECK_THROWS_AS(sf::log_gamma(0.0), qvdp::DomainError);
  CHECK_THROWS_AS(sf::log_gamma(-1.5), qvdp::DomainError);
}

TEST_CASE("log_gamma recurrence over [0.5, 1e6]") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(std::log(0.5), std::log(1e6));
  for (int i = 0; i < 1000; ++i) {
    const double x = std::exp(u(rng));
    const double lhs = sf::log_gamma(x + 1.0) - sf::log_gamma(x);
    // Subtracting two values of size |lgamma(x+1)| costs a few ulps of that size.
    const double floor = 4.0 * std::numeric_limits<double>::epsilon() * std::abs(sf::log_gamma(x + 1.0));
    CHECK(std::abs(lhs - std::log(x)) <= 1e-12 * std::abs(std::log(x)) + floor + 1e-15);
  }
}

TEST_CASE("pochhammer_log examples") {
  const auto p0 = sf::pochhammer_log(3.0, 0);
  CHECK(p0.sign == 1);
  CHECK(p0.log_magnitude == 0.0);
  CHECK(std::abs(sf::pochhammer_log(2.0, 3).log_magnitude - std::log(24.0)) < 1e-14);

  mp::cpp_rational prod = 1;
  for (int i = 0; i < 50; ++i) prod *= mp::cpp_rational(2001 + 2 * i, 2);
  const double exact = static_cast<double>(log(Big(prod)));
  CHECK(rel(sf::pochhammer_log(1000.5, 50).log_magnitude, exact) < 1e-12);

  CHECK_THROWS_AS(sf::pochhammer_log(0.0, 3), qvdp::DomainError);
  CHECK_THROWS_AS(sf::pochhammer_log(-2.0, 3), qvdp::DomainError);
}

TEST_CASE("hyp1f1_log examples") {
  CHECK(sf::hyp1f1_log(1, 5, 0).log_magnitude == 0.0);
  CHECK(sf::hyp1f1_log(2, 2, 1).log_magnitude == doctest::Approx(1.0).epsilon(1e-14));

  const double oracle = static_cast<double>(log(series<Big>({1.0}, {2001.0}, Big(2000))));
  CHECK(rel(sf::hyp1f1_log(1, 2001, 2000).value(), std::exp(oracle)) < 1e-9);

  sf::SeriesOptions capped;
  capped.max_terms = 10;
  CHECK_THROWS_AS(sf::hyp1f1_log(1, 2, 1000, capped), qvdp::ConvergenceError);
  CHECK_THROWS_AS(sf::hyp1f1_log(1, 0, 1), qvdp::DomainError);
  CHECK_THROWS_AS(sf::hyp1f1_log(1, 2, -1), qvdp::DomainError);
}

TEST_CASE("hyp0f1_log examples") {
  CHECK(sf::hyp0f1_log(3, 0).log_magnitude == 0.0);
  const double o1 = static_cast<double>(log(series<Big>({}, {1.0}, Big(1))));
  CHECK(std::abs(sf::hyp0f1_log(1, 1).log_magnitude - o1) < 1e-12);

  const auto big = sf::hyp0f1_log(2000, 4e6);
  REQUIRE(std::isfinite(big.log_magnitude));
  const double o2 = static_cast<double>(log(series<Big>({}, {2000.0}, Big(4e6))));
  // Relative error of the value is the absolute error of its log.
  CHECK(std::abs(big.log_magnitude - o2) < 1e-9);
}

TEST_CASE("hyp_complex examples") {
  using C = std::complex<double>;
  CHECK(std::abs(sf::hyp_complex({{}, {C(2), C(3)}, C(0)}) - C(1)) == 0.0);
  CHECK(std::abs(sf::hyp_complex({{C(1)}, {C(1, 2)}, C(0)}) - C(1)) == 0.0);

  // Complex oracle: component-wise high-precision recursion.
  using R = Mid;
  const std::complex<double> b1(1, 1), b2(2, -1), z(3, 0.5);
  R tr = 1, ti = 0, sr = 1, si = 0;
  for (int k = 0; k < 400; ++k) {
    // ratio = z / ((k+1)(b1+k)(b2+k))
    const std::complex<R> zc(R(z.real()), R(z.imag()));
    const std::complex<R> d1(R(b1.real()) + k, R(b1.imag()));
    const std::complex<R> d2(R(b2.real()) + k, R(b2.imag()));
    const std::complex<R> den = d1 * d2 * R(k + 1);
    const std::complex<R> ratio = zc / den;
    const std::complex<R> t = std::complex<R>(tr, ti) * ratio;
    tr = t.real();
    ti = t.imag();
    sr += tr;
    si += ti;
  }
  const C expected(static_cast<double>(sr), static_cast<double>(si));
  const C got = sf::hyp_complex({{}, {b1, b2}, z});
  CHECK(std::abs(got - expected) / std::abs(expected) < 1e-8);

  CHECK_THROWS_AS(sf::hyp_complex({{}, {C(-2, 0)}, C(1)}), qvdp::PoleError);
  CHECK_THROWS_AS(sf::hyp_complex({{C(1), C(2)}, {C(3), C(4)}, C(1)}), qvdp::DomainError);
}

TEST_CASE("Kummer transformation on 1000 random samples") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> uz(0.0, 50.0), ub(1.0, 100.0), ut(0.0, 1.0);
  int failures = 0;
  for (int i = 0; i < 1000; ++i) {
    const double b = ub(rng);
    const double a = 1.0 + ut(rng) * (b - 1.0);
    const double z = uz(rng);
    // Alternating series in high precision for 1F1(b - a; b; -z).
    const Big alt = series<Big>({b - a}, {b}, Big(-z));
    const double rhs = static_cast<double>(exp(Big(z)) * alt);
    const double lhs = sf::hyp1f1_log(a, b, z).value();
    if (rel(lhs, rhs) >= 1e-8) ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("0F1 contiguous relation on 1000 random samples") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> ub(2.0, 200.0), uz(1.0, 1000.0);
  int failures = 0;
  for (int i = 0; i < 1000; ++i) {
    const double b = ub(rng);
    const double z = uz(rng);
    const double lhs = sf::hyp0f1_log(b - 1, z).value() - sf::hyp0f1_log(b, z).value();
    const double rhs = z / (b * (b - 1)) * sf::hyp0f1_log(b + 1, z).value();
    if (rel(lhs, rhs) >= 1e-9) ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("hyp1f1_log is increasing in z") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ua(0.1, 100.0), ub(0.5, 500.0);
  for (int i = 0; i < 100; ++i) {
    const double a = ua(rng);
    const double b = ub(rng);
    double prev = sf::hyp1f1_log(a, b, 0.0).log_magnitude;
    for (double z = 0.5; z < 200.0; z *= 1.7) {
      const double cur = sf::hyp1f1_log(a, b, z).log_magnitude;
      CHECK(cur > prev);
      prev = cur;
    }
  }
}

TEST_CASE("LogValue arithmetic") {
  const auto a = sf::LogValue::from(-3.0);
  const auto b = sf::LogValue::from(2.0);
  CHECK((a * b).value() == doctest::Approx(-6.0));
  CHECK((a / b).value() == doctest::Approx(-1.5));
  CHECK(sf::LogValue::from(0.0).is_zero());
  CHECK(sf::LogValue::zero().value() == 0.0);
}

TEST_CASE("stress fixture against high-precision series") {
  std::ifstream in(QVDP_FIXTURE_DIR "/specialfn_stress.csv");
  REQUIRE(in.good());
  std::string line;
  std::getline(in, line);
  int cases = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    REQUIRE(f.size() == 9);
    const std::string& kind = f[0];
    const double tol = std::stod(f[8]);
    const double expected = std::stod(f[6]);
    CAPTURE(line);
    if (kind == "log_gamma") {
      CHECK(std::abs(sf::log_gamma(std::stod(f[1])) - expected) <= tol * std::max(1.0, std::abs(expected)));
    } else if (kind == "pochhammer") {
      const auto v = sf::pochhammer_log(std::stod(f[1]), std::stoul(f[2]));
      CHECK(std::abs(v.log_magnitude - expected) <= tol * std::max(1.0, std::abs(expected)));
    } else if (kind == "hyp1f1") {
      const auto v = sf::hyp1f1_log(std::stod(f[1]), std::stod(f[2]), std::stod(f[3]));
      CHECK(std::abs(v.log_magnitude - expected) <= tol);
    } else if (kind == "hyp0f1") {
      const auto v = sf::hyp0f1_log(std::stod(f[1]), std::stod(f[2]));
      CHECK(std::abs(v.log_magnitude - expected) <= tol);
    } else {
      const auto params = parse_complex_list(f[1]);
      const std::size_t n_num = kind == "1F1" ? 1 : 0;
      const std::size_t n_den = kind == "0F2" ? 2 : 1;
      REQUIRE(params.size() == n_num + n_den + 1);
      sf::HypergeometricSpec spec;
      spec.numerator_params.assign(params.begin(), params.begin() + n_num);
      spec.denominator_params.assign(params.begin() + n_num, params.begin() + n_num + n_den);
      spec.argument = params.back();
      const std::complex<double> want(expected, std::stod(f[7]));
      const auto got = sf::hyp_complex(spec);
      CHECK(std::abs(got - want) <= tol * std::max(1.0, std::abs(want)));
    }
    ++cases;
  }
  CHECK(cases >= 100);
}
