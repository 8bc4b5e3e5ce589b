#include "qvdp/params.hpp"

#include <cmath>
#include <string>

#include "qvdp/error.hpp"

namespace qvdp {

SystemParams::SystemParams(double g, double eta, double kappa, double omega0,
                           NumericalControls numerics)
    : g_(g), eta_(eta), kappa_(kappa), omega0_(omega0), numerics_(numerics) {
  if (!std::isfinite(g) || !std::isfinite(eta) || !std::isfinite(kappa) ||
      !std::isfinite(omega0)) {
    throw DomainError("SystemParams: rates must be finite");
  }
  if (!(kappa > 0.0)) throw DomainError("SystemParams: kappa must be > 0");
  if (!(eta > 0.0)) throw DomainError("SystemParams: eta must be > 0");
  if (!(g >= 0.0)) throw DomainError("SystemParams: g must be >= 0");
  if (numerics_.truncation && *numerics_.truncation < 2) {
    throw DomainError("SystemParams: truncation must keep at least 2 Fock levels");
  }
  if (!(numerics_.tail_tolerance > 0.0)) {
    throw DomainError("SystemParams: tail_tolerance must be > 0");
  }
}

SystemParams SystemParams::with_g(double g) const {
  return SystemParams(g, eta_, kappa_, omega0_, numerics_);
}

SystemParams SystemParams::with_eta(double eta) const {
  return SystemParams(g_, eta, kappa_, omega0_, numerics_);
}

SystemParams SystemParams::with_truncation(std::optional<std::size_t> trunc) const {
  NumericalControls n = numerics_;
  n.truncation = trunc;
  return SystemParams(g_, eta_, kappa_, omega0_, n);
}

}  // namespace qvdp
