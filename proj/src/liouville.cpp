#include "qvdp/liouville.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "compensated.hpp"
#include "parallel.hpp"
#include "qvdp/error.hpp"

namespace qvdp::liouville {

namespace {

using cplx = std::complex<double>;

void require_truncation(int k, std::size_t trunc) {
  if (k < 0) throw DomainError("build_block: offset k must be >= 0");
  if (trunc <= static_cast<std::size_t>(k) + 4) {
    throw DomainError("build_block: truncation " + std::to_string(trunc) +
                      " too small for offset " + std::to_string(k) + " (need > k + 4)");
  }
}

bool by_real_part_desc(const cplx& a, const cplx& b) {
  if (a.real() != b.real()) return a.real() > b.real();
  return a.imag() > b.imag();
}

// The block after the diagonal similarity exp(-log_balance) A exp(log_balance).
linalg::BandedMatrix balanced_band(const BlockGenerator& block) {
  if (block.log_balance.empty()) return block.banded();
  const std::size_t d = block.dimension;
  const auto& ls = block.log_balance;
  linalg::BandedMatrix m(d, 1, 2);
  for (std::size_t n = 0; n < d; ++n) {
    m.set(n, n, block.diagonal[n]);
    if (n >= 1) m.set(n, n - 1, block.from_lower[n] * std::exp(ls[n - 1] - ls[n]));
    if (n + 1 < d) m.set(n, n + 1, block.from_upper1[n] * std::exp(ls[n + 1] - ls[n]));
    if (n + 2 < d) m.set(n, n + 2, block.from_upper2[n] * std::exp(ls[n + 2] - ls[n]));
  }
  return m;
}

std::vector<cplx> dense_eigenvalues(const linalg::BandedMatrix& band) {
  const std::size_t d = band.size();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i) {
    const std::size_t lo = i > 0 ? i - 1 : 0;
    const std::size_t hi = std::min(d - 1, i + 2);
    for (std::size_t j = lo; j <= hi; ++j) {
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = band.get(i, j);
    }
  }
  Eigen::EigenSolver<Eigen::MatrixXd> solver(a, false);
  if (solver.info() != Eigen::Success) throw ConvergenceError("dense eigensolver failed");
  std::vector<cplx> out(solver.eigenvalues().begin(), solver.eigenvalues().end());
  return out;
}

// Arnoldi on (A - sigma)^{-1} with full reorthogonalisation.
struct ArnoldiPass {
  std::vector<cplx> values;  // eigenvalues of A, nearest sigma first
  bool converged = false;
};

ArnoldiPass arnoldi_pass(const linalg::BandedLU& lu, double sigma, std::size_t m,
                         std::size_t count, double tolerance) {
  const auto d = static_cast<Eigen::Index>(lu.size());
  const auto mi = static_cast<Eigen::Index>(m);
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(d, mi + 1);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(mi + 1, mi);
  for (Eigen::Index i = 0; i < d; ++i) {
    v(i, 0) = 1.0 + 0.5 * std::sin(1.3 * static_cast<double>(i) + 0.7);
  }
  v.col(0).normalize();

  Eigen::Index steps = mi;
  bool breakdown = false;
  for (Eigen::Index j = 0; j < mi; ++j) {
    Eigen::VectorXd w = v.col(j);
    lu.solve(std::span<double>(w.data(), static_cast<std::size_t>(d)));
    const double w_norm0 = w.norm();
    for (int pass = 0; pass < 2; ++pass) {
      const Eigen::VectorXd c = v.leftCols(j + 1).transpose() * w;
      w.noalias() -= v.leftCols(j + 1) * c;
      h.col(j).head(j + 1) += c;
    }
    const double beta = w.norm();
    h(j + 1, j) = beta;
    if (beta <= 1e-14 * w_norm0) {
      steps = j + 1;
      breakdown = true;
      break;
    }
    v.col(j + 1) = w / beta;
  }

  Eigen::EigenSolver<Eigen::MatrixXd> es(h.topLeftCorner(steps, steps), true);
  if (es.info() != Eigen::Success) throw ConvergenceError("Arnoldi: Ritz eigensolver failed");
  const Eigen::VectorXcd theta = es.eigenvalues();
  const Eigen::MatrixXcd y = es.eigenvectors();
  const double beta = h(steps, steps - 1);

  std::vector<Eigen::Index> order(static_cast<std::size_t>(steps));
  for (Eigen::Index i = 0; i < steps; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(theta(a)) > std::abs(theta(b));
  });

  ArnoldiPass out;
  out.converged = true;
  const std::size_t wanted = std::min(count, static_cast<std::size_t>(steps));
  for (std::size_t r = 0; r < wanted; ++r) {
    const Eigen::Index i = order[r];
    const double residual = breakdown ? 0.0 : std::abs(beta * y(steps - 1, i)) / y.col(i).norm();
    if (residual > tolerance * std::abs(theta(i))) out.converged = false;
    out.values.push_back(sigma + 1.0 / theta(i));
  }
  if (wanted < count) out.converged = out.converged && static_cast<std::size_t>(steps) == lu.size();
  return out;
}

std::vector<cplx> shift_invert_eigenvalues(linalg::BandedMatrix band, std::size_t count,
                                           const EigenOptions& opt) {
  const double sigma = opt.shift;
  if (!(sigma > 0.0)) throw DomainError("leading_eigenvalues: shift must be > 0");
  const std::size_t d = band.size();
  band.add_diagonal(-sigma);
  const linalg::BandedLU lu(std::move(band));
  std::size_t m = std::min(d, std::max<std::size_t>(2 * count + 30, 40));
  while (true) {
    auto pass = arnoldi_pass(lu, sigma, m, count, opt.tolerance);
    if (pass.converged || m == d) {
      if (!pass.converged) {
        throw ConvergenceError("Arnoldi: Ritz values did not converge at full dimension");
      }
      return pass.values;
    }
    m = std::min(d, 2 * m);
  }
}

// Entries of the truncated annihilation operator, a_{n-1, n} = sqrt(n).
Eigen::MatrixXcd annihilation(std::size_t trunc) {
  const auto d = static_cast<Eigen::Index>(trunc);
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(d, d);
  for (Eigen::Index n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

// out += coeff * (A rho B) on row-major vec(rho).
void add_sandwich(Eigen::MatrixXcd& out, const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b,
                  cplx coeff) {
  const Eigen::Index d = a.rows();
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const cplx aij = a(i, j);
      if (aij == 0.0) continue;
      for (Eigen::Index k = 0; k < d; ++k) {
        for (Eigen::Index l = 0; l < d; ++l) {
          const cplx bkl = b(k, l);
          if (bkl == 0.0) continue;
          out(i * d + l, j * d + k) += coeff * aij * bkl;
        }
      }
    }
  }
}

void add_dissipator(Eigen::MatrixXcd& out, const Eigen::MatrixXcd& jump, double rate) {
  if (rate == 0.0) return;
  const Eigen::Index d = jump.rows();
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(d, d);
  const Eigen::MatrixXcd jd = jump.adjoint();
  const Eigen::MatrixXcd n = jd * jump;
  add_sandwich(out, jump, jd, rate);
  add_sandwich(out, n, id, -0.5 * rate);
  add_sandwich(out, id, n, -0.5 * rate);
}

// Unnormalised log p_n of the k = 0 kernel by bottom-up elimination. Every
// Schur complement of a trace-preserving block is again trace preserving, so
// each pivot is recomputed as minus the sum of the off-diagonal entries above
// it in its column. Only nonnegative numbers are added, which avoids the
// cancellation of plain elimination. Afterwards row j couples only p_{j-1} and p_j.
std::vector<double> kernel_log_weights(const BlockGenerator& block) {
  const std::size_t d = block.dimension;
  std::vector<double> up1 = block.from_upper1;
  std::vector<double> pivots(d, 0.0);
  double scale = 0.0;
  for (double v : block.diagonal) scale = std::max(scale, std::abs(v));
  const double floor = 1e-14 * scale;

  for (std::size_t j = d - 1; j >= 1; --j) {
    const double pivot = up1[j - 1] + (j >= 2 ? block.from_upper2[j - 2] : 0.0);
    if (!(pivot > floor)) {
      throw SingularError("steady_state_oracle: pivot " + std::to_string(pivot) + " at level " +
                          std::to_string(j) + "; kernel is not one-dimensional");
    }
    pivots[j] = pivot;
    if (j >= 2) up1[j - 2] += block.from_upper2[j - 2] / pivot * block.from_lower[j];
  }

  std::vector<double> log_p(d, 0.0);
  for (std::size_t j = 1; j < d; ++j) {
    const double ratio = block.from_lower[j] / pivots[j];
    if (!(ratio >= 0.0) || !std::isfinite(ratio)) {
      throw SingularError("steady_state_oracle: negative kernel ratio at level " +
                          std::to_string(j));
    }
    log_p[j] = log_p[j - 1] + std::log(ratio);
  }
  return log_p;
}

}  // namespace

linalg::BandedMatrix BlockGenerator::banded() const {
  linalg::BandedMatrix m(dimension, 1, 2);
  for (std::size_t n = 0; n < dimension; ++n) {
    m.set(n, n, diagonal[n]);
    if (n >= 1) m.set(n, n - 1, from_lower[n]);
    if (n + 1 < dimension) m.set(n, n + 1, from_upper1[n]);
    if (n + 2 < dimension) m.set(n, n + 2, from_upper2[n]);
  }
  return m;
}

Eigen::MatrixXcd BlockGenerator::to_dense() const {
  const auto d = static_cast<Eigen::Index>(dimension);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
  for (Eigen::Index n = 0; n < d; ++n) {
    const auto u = static_cast<std::size_t>(n);
    m(n, n) = cplx(diagonal[u], imag_shift);
    if (n >= 1) m(n, n - 1) = from_lower[u];
    if (n + 1 < d) m(n, n + 1) = from_upper1[u];
    if (n + 2 < d) m(n, n + 2) = from_upper2[u];
  }
  return m;
}

double BlockGenerator::column_sum(std::size_t j) const {
  double s = diagonal[j];
  if (j + 1 < dimension) s += from_lower[j + 1];
  if (j >= 1) s += from_upper1[j - 1];
  if (j >= 2) s += from_upper2[j - 2];
  return s;
}

namespace {

BlockGenerator block_entries(const SystemParams& p, int k, std::size_t trunc, Frame frame) {
  require_truncation(k, trunc);
  const double g = p.g();
  const double kappa = p.kappa();
  const double eta = p.eta();
  const auto ku = static_cast<std::size_t>(k);

  BlockGenerator b;
  b.offset_k = k;
  b.truncation = trunc;
  b.dimension = trunc - ku;
  b.frame = frame;
  b.imag_shift = frame == Frame::lab ? p.omega0() * k : 0.0;
  b.from_lower.assign(b.dimension, 0.0);
  b.diagonal.assign(b.dimension, 0.0);
  b.from_upper1.assign(b.dimension, 0.0);
  b.from_upper2.assign(b.dimension, 0.0);

  const std::size_t top = trunc - 1;  // highest Fock level kept
  for (std::size_t n = 0; n < b.dimension; ++n) {
    const std::size_t m = n + ku;
    const double nd = static_cast<double>(n);
    const double md = static_cast<double>(m);
    if (n >= 1) b.from_lower[n] = g * std::sqrt(nd * md);
    if (n + 1 < b.dimension) b.from_upper1[n] = kappa * std::sqrt((nd + 1.0) * (md + 1.0));
    if (n + 2 < b.dimension) {
      b.from_upper2[n] = eta * std::sqrt((nd + 1.0) * (nd + 2.0) * (md + 1.0) * (md + 2.0));
    }
    // a a^dag is truncated at the top level, which keeps the k = 0 block trace preserving.
    const double pump = (n < top ? nd + 1.0 : 0.0) + (m < top ? md + 1.0 : 0.0);
    b.diagonal[n] = -(kappa * (nd + md) / 2.0 + g * pump / 2.0 +
                      eta * (nd * (nd - 1.0) + md * (md - 1.0)) / 2.0);
  }
  return b;
}

}  // namespace

BlockGenerator build_block(const SystemParams& p, int k, std::size_t trunc, Frame frame) {
  BlockGenerator b = block_entries(p, k, trunc, frame);
  if (!(p.g() > 0.0)) return b;
  // Balance with the fourth root of p_n p_{n+k} from the k = 0 kernel.
  try {
    const auto lp = kernel_log_weights(k == 0 ? b : block_entries(p, 0, trunc, Frame::rotating));
    b.log_balance.resize(b.dimension);
    for (std::size_t n = 0; n < b.dimension; ++n) {
      b.log_balance[n] = 0.25 * (lp[n] + lp[n + static_cast<std::size_t>(k)]);
      if (!std::isfinite(b.log_balance[n])) {
        b.log_balance.clear();
        break;
      }
    }
  } catch (const SingularError&) {
    b.log_balance.clear();
  }
  return b;
}

exactstate::DiagonalState steady_state_oracle(const SystemParams& p, std::size_t trunc) {
  const auto log_p = kernel_log_weights(build_block(p, 0, trunc));
  const double peak = *std::max_element(log_p.begin(), log_p.end());
  exactstate::DiagonalState s;
  s.truncation = trunc;
  s.source = exactstate::StateSource::oracle;
  s.probabilities.resize(trunc);
  detail::CompensatedSum mass;
  for (std::size_t n = 0; n < trunc; ++n) {
    s.probabilities[n] = std::exp(log_p[n] - peak);
    mass.add(s.probabilities[n]);
  }
  for (double& v : s.probabilities) v /= mass.value();
  return s;
}

std::vector<cplx> leading_eigenvalues(const BlockGenerator& block, std::size_t count,
                                      const EigenOptions& opt) {
  if (count == 0) return {};
  std::vector<cplx> values;
  auto dense = [&] {
    values = dense_eigenvalues(balanced_band(block));
    std::sort(values.begin(), values.end(), by_real_part_desc);
    if (values.size() > count) values.resize(count);
  };
  if (opt.method == EigenMethod::dense) {
    dense();
  } else {
    try {
      values = shift_invert_eigenvalues(balanced_band(block), count, opt);
      std::sort(values.begin(), values.end(), by_real_part_desc);
    } catch (const Error&) {
      if (opt.method == EigenMethod::shift_invert || block.dimension > opt.dense_limit) throw;
      dense();
    }
  }
  for (auto& v : values) v += cplx(0.0, block.imag_shift);
  return values;
}

std::size_t spectral_truncation(const SystemParams& p) {
  const std::size_t base = exactstate::auto_truncation(p);
  return base + base / 4 + 10;
}

namespace {

struct K0Spectrum {
  double gap;
  std::vector<cplx> values;
};

K0Spectrum k0_gap(const SystemParams& p, std::size_t trunc, const EigenOptions& opt) {
  const auto block = build_block(p, 0, trunc);
  EigenOptions o = opt;
  o.shift = opt.shift * p.kappa();
  auto values = leading_eigenvalues(block, 4, o);
  std::size_t zero = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (std::abs(values[i]) < std::abs(values[zero])) zero = i;
  }
  if (!(std::abs(values[zero]) < 1e-10 * p.kappa())) {
    throw ZeroModeError("zero mode not identified: smallest |lambda| = " +
                        std::to_string(std::abs(values[zero])));
  }
  double best = -INFINITY;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i != zero) best = std::max(best, values[i].real());
  }
  return {-best, std::move(values)};
}

}  // namespace

double real_dissipative_gap(const SystemParams& p, std::optional<std::size_t> trunc,
                            const EigenOptions& opt) {
  return k0_gap(p, trunc.value_or(spectral_truncation(p)), opt).gap;
}

SpectralSummary asymptotic_decay_rate(const SystemParams& p, std::optional<std::size_t> trunc,
                                      int k_max, const EigenOptions& opt) {
  if (k_max < 1) throw DomainError("asymptotic_decay_rate: k_max must be >= 1");
  const std::size_t t = trunc.value_or(spectral_truncation(p));
  SpectralSummary s;
  s.truncation = t;
  s.leading_eigenvalues.resize(static_cast<std::size_t>(k_max) + 1);
  std::vector<double> rates(s.leading_eigenvalues.size());

  detail::parallel_for(s.leading_eigenvalues.size(), [&](std::size_t i) {
    const int k = static_cast<int>(i);
    auto& slot = s.leading_eigenvalues[i];
    slot.k = k;
    if (k == 0) {
      auto r = k0_gap(p, t, opt);
      rates[i] = r.gap;
      slot.eigenvalues = std::move(r.values);
      return;
    }
    EigenOptions o = opt;
    o.shift = opt.shift * p.kappa();
    slot.eigenvalues = leading_eigenvalues(build_block(p, k, t), 3, o);
    rates[i] = -slot.eigenvalues.front().real();
  });

  s.rdg = rates[0];
  s.adr_block = 0;
  s.adr = rates[0];
  for (std::size_t i = 1; i < rates.size(); ++i) {
    if (rates[i] < s.adr) {
      s.adr = rates[i];
      s.adr_block = static_cast<int>(i);
    }
  }
  s.relaxation_time = s.adr > 0.0 ? 1.0 / s.adr : INFINITY;
  return s;
}

std::complex<double> DensityMatrix::trace() const {
  cplx t = 0.0;
  for (std::size_t i = 0; i < dimension; ++i) t += at(i, i);
  return t;
}

Eigen::MatrixXcd full_liouvillian(const SystemParams& p, std::size_t trunc, Frame frame,
                                  const std::optional<exactstate::DrivenBranchParams>& drive) {
  if (trunc < 2) throw DomainError("full_liouvillian: truncation must be >= 2");
  const auto d = static_cast<Eigen::Index>(trunc);
  const Eigen::MatrixXcd a = annihilation(trunc);
  const Eigen::MatrixXcd ad = a.adjoint();
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(d, d);
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(d, d);
  if (frame == Frame::lab) h += p.omega0() * ad * a;
  if (drive) {
    h += -drive->delta() * ad * a + drive->epsilon() * ad + std::conj(drive->epsilon()) * a;
  }

  Eigen::MatrixXcd l = Eigen::MatrixXcd::Zero(d * d, d * d);
  const cplx minus_i(0.0, -1.0);
  add_sandwich(l, h, id, minus_i);
  add_sandwich(l, id, h, -minus_i);
  add_dissipator(l, a, p.kappa());
  add_dissipator(l, ad, p.g());
  add_dissipator(l, a * a, p.eta());
  return l;
}

DensityMatrix dense_steady_state(const SystemParams& p, std::size_t trunc,
                                 const std::optional<exactstate::DrivenBranchParams>& drive) {
  Eigen::MatrixXcd l = full_liouvillian(p, trunc, Frame::rotating, drive);
  const auto d = static_cast<Eigen::Index>(trunc);
  l.row(0).setZero();
  for (Eigen::Index i = 0; i < d; ++i) l(0, i * d + i) = 1.0;
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(d * d);
  rhs(0) = 1.0;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(l);
  const Eigen::VectorXcd x = lu.solve(rhs);
  if (!x.allFinite()) throw SingularError("dense_steady_state: singular Liouvillian");

  DensityMatrix rho;
  rho.dimension = trunc;
  rho.values.resize(trunc * trunc);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      rho.values[static_cast<std::size_t>(i * d + j)] = 0.5 * (x(i * d + j) + std::conj(x(j * d + i)));
    }
  }
  return rho;
}

double wigner_at_origin(const DensityMatrix& rho) {
  double parity = 0.0;
  for (std::size_t n = 0; n < rho.dimension; ++n) {
    parity += (n % 2 == 0 ? 1.0 : -1.0) * rho.at(n, n).real();
  }
  return 2.0 / std::numbers::pi * parity;
}

}  // namespace qvdp::liouville
