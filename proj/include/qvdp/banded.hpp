#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace qvdp::linalg {

/// Square real band matrix with kl sub- and ku super-diagonals. Each row keeps
/// kl extra slots on the right for the fill-in produced by partial pivoting.
class BandedMatrix {
 public:
  BandedMatrix(std::size_t n, std::size_t kl, std::size_t ku);

  [[nodiscard]] std::size_t size() const { return n_; }
  [[nodiscard]] std::size_t lower() const { return kl_; }
  [[nodiscard]] std::size_t upper() const { return ku_; }

  /// Zero outside the stored band.
  [[nodiscard]] double get(std::size_t i, std::size_t j) const;
  /// Requires i - kl <= j <= i + ku + kl.
  void set(std::size_t i, std::size_t j, double v);
  void add_diagonal(double shift);

  /// y = A x
  void multiply(std::span<const double> x, std::span<double> y) const;

 private:
  friend class BandedLU;
  [[nodiscard]] bool stored(std::size_t i, std::size_t j) const;
  double& ref(std::size_t i, std::size_t j) { return data_[i * width_ + (j + kl_ - i)]; }
  [[nodiscard]] double cref(std::size_t i, std::size_t j) const {
    return data_[i * width_ + (j + kl_ - i)];
  }

  std::size_t n_;
  std::size_t kl_;
  std::size_t ku_;
  std::size_t width_;
  std::vector<double> data_;
};

/// LU factorisation with partial pivoting, P A = L U, in band storage.
class BandedLU {
 public:
  /// Throws SingularError on an exactly zero pivot.
  explicit BandedLU(BandedMatrix a);

  /// Solves A x = b in place.
  void solve(std::span<double> b) const;

  [[nodiscard]] std::size_t size() const { return lu_.size(); }
  /// Smallest |U_jj| divided by the largest.
  [[nodiscard]] double pivot_ratio() const { return pivot_ratio_; }

 private:
  BandedMatrix lu_;
  std::vector<std::size_t> pivots_;
  double pivot_ratio_ = 1.0;
};

}  // namespace qvdp::linalg
