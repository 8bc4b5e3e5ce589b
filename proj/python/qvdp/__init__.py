"""Steady state, Liouvillian spectra and metrology of the quantum van der Pol oscillator."""

from ._core import (
    QvdpError,
    SystemParams,
    __version__,
    asymptotic_decay_rate,
    driven_branch_wigner,
    factorial_moments,
    limit_report,
    metrology,
    photon_distribution,
    real_dissipative_gap,
    steady_state_oracle,
    sweep,
    fit_exponent,
    wigner,
)

__all__ = [
    "QvdpError",
    "SystemParams",
    "__version__",
    "asymptotic_decay_rate",
    "driven_branch_wigner",
    "factorial_moments",
    "fit_exponent",
    "limit_report",
    "metrology",
    "photon_distribution",
    "real_dissipative_gap",
    "steady_state_oracle",
    "sweep",
    "wigner",
]
