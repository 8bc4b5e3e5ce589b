#include "qvdp/banded.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qvdp/error.hpp"

namespace qvdp::linalg {

BandedMatrix::BandedMatrix(std::size_t n, std::size_t kl, std::size_t ku)
    : n_(n), kl_(kl), ku_(ku), width_(2 * kl + ku + 1), data_(n * width_, 0.0) {
  if (n == 0) throw DomainError("BandedMatrix: empty matrix");
}

bool BandedMatrix::stored(std::size_t i, std::size_t j) const {
  return i < n_ && j < n_ && j + kl_ >= i && j <= i + ku_ + kl_;
}

double BandedMatrix::get(std::size_t i, std::size_t j) const {
  return stored(i, j) ? cref(i, j) : 0.0;
}

void BandedMatrix::set(std::size_t i, std::size_t j, double v) {
  if (!stored(i, j)) {
    throw DomainError("BandedMatrix: entry (" + std::to_string(i) + ", " + std::to_string(j) +
                      ") outside the band");
  }
  ref(i, j) = v;
}

void BandedMatrix::add_diagonal(double shift) {
  for (std::size_t i = 0; i < n_; ++i) ref(i, i) += shift;
}

void BandedMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t lo = i >= kl_ ? i - kl_ : 0;
    const std::size_t hi = std::min(n_ - 1, i + ku_ + kl_);
    double acc = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) acc += cref(i, j) * x[j];
    y[i] = acc;
  }
}

BandedLU::BandedLU(BandedMatrix a) : lu_(std::move(a)), pivots_(lu_.size()) {
  const std::size_t n = lu_.n_;
  const std::size_t kl = lu_.kl_;
  const std::size_t span_u = lu_.ku_ + kl;
  double min_pivot = INFINITY;
  double max_pivot = 0.0;

  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t last_row = std::min(n - 1, j + kl);
    std::size_t p = j;
    for (std::size_t i = j + 1; i <= last_row; ++i) {
      if (std::abs(lu_.cref(i, j)) > std::abs(lu_.cref(p, j))) p = i;
    }
    pivots_[j] = p;
    const std::size_t last_col = std::min(n - 1, j + span_u);
    if (p != j) {
      for (std::size_t c = j; c <= last_col; ++c) std::swap(lu_.ref(j, c), lu_.ref(p, c));
    }
    const double pivot = lu_.cref(j, j);
    if (pivot == 0.0) {
      throw SingularError("BandedLU: zero pivot in column " + std::to_string(j));
    }
    min_pivot = std::min(min_pivot, std::abs(pivot));
    max_pivot = std::max(max_pivot, std::abs(pivot));
    for (std::size_t i = j + 1; i <= last_row; ++i) {
      const double factor = lu_.cref(i, j) / pivot;
      lu_.ref(i, j) = factor;
      if (factor == 0.0) continue;
      for (std::size_t c = j + 1; c <= last_col; ++c) lu_.ref(i, c) -= factor * lu_.cref(j, c);
    }
  }
  pivot_ratio_ = min_pivot / max_pivot;
}

void BandedLU::solve(std::span<double> b) const {
  const std::size_t n = lu_.n_;
  const std::size_t kl = lu_.kl_;
  const std::size_t span_u = lu_.ku_ + kl;
  for (std::size_t j = 0; j < n; ++j) {
    if (pivots_[j] != j) std::swap(b[j], b[pivots_[j]]);
    const std::size_t last_row = std::min(n - 1, j + kl);
    for (std::size_t i = j + 1; i <= last_row; ++i) b[i] -= lu_.cref(i, j) * b[j];
  }
  for (std::size_t jj = n; jj-- > 0;) {
    const std::size_t last_col = std::min(n - 1, jj + span_u);
    double acc = b[jj];
    for (std::size_t c = jj + 1; c <= last_col; ++c) acc -= lu_.cref(jj, c) * b[c];
    b[jj] = acc / lu_.cref(jj, jj);
  }
}

}  // namespace qvdp::linalg
