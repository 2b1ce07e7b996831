"""Exact reference dynamics in the single-excitation (CIS) sector.

The truncated basis is [ |g,0>, |e_alpha,0> (N), |g,1_j> (M) ] and energies
are measured relative to |g,0> (the constant ground offset drops out of the
dynamics).  Propagation uses a cached dense eigen-decomposition, which is
exact and cheap at the dimensions used here (<= ~600).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ModeBasis, SystemConfig, coupling_matrix, mode_basis_for

__all__ = [
    "CisState",
    "CisHamiltonian",
    "build_cis_hamiltonian",
    "initial_state",
    "propagate_cis",
    "cis_population",
    "cis_intensity",
    "population_series",
]


@dataclass
class CisState:
    """Amplitude vector (c0, c_alpha..., d_j...) of dimension 1 + N + M."""

    amplitudes: np.ndarray
    n_tls: int

    @property
    def c0(self) -> complex:
        return self.amplitudes[0]

    @property
    def c_tls(self) -> np.ndarray:
        return self.amplitudes[1:1 + self.n_tls]

    @property
    def d_modes(self) -> np.ndarray:
        return self.amplitudes[1 + self.n_tls:]

    def norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))


class CisHamiltonian:
    """Real symmetric CIS matrix with its eigen-decomposition cached."""

    def __init__(self, matrix: np.ndarray, n_tls: int, basis: ModeBasis):
        self.matrix = matrix
        self.n_tls = n_tls
        self.basis = basis
        try:
            self.evals, self.evecs = np.linalg.eigh(matrix)
        except np.linalg.LinAlgError as exc:  # pragma: no cover
            raise ArithmeticError(f"CIS eigen-decomposition failed: {exc}") from exc

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def build_cis_hamiltonian(config: SystemConfig, basis: ModeBasis | None = None) -> CisHamiltonian:
    """Single-excitation Hamiltonian relative to the ground energy.

    The |g,0> row and column vanish (rotating-wave sector), TLS excitations sit
    at omega0, photons at omega_j, and the off-diagonal block is -g[alpha, j].
    """
    basis = basis if basis is not None else mode_basis_for(config)
    n = config.n_tls
    g = coupling_matrix(config, basis)
    dim = 1 + n + basis.M
    h = np.zeros((dim, dim))
    idx_tls = np.arange(1, 1 + n)
    idx_ph = np.arange(1 + n, dim)
    h[idx_tls, idx_tls] = config.omega0
    h[idx_ph, idx_ph] = basis.omega
    h[1:1 + n, 1 + n:] = -g
    h[1 + n:, 1:1 + n] = -g.T
    return CisHamiltonian(h, n, basis)


def initial_state(config: SystemConfig) -> CisState:
    """|e_alpha, 0> for the single initially excited TLS, else |g, 0>.

    More than one excited TLS cannot be represented in the CIS sector.
    """
    n = config.n_tls
    excited = [i for i, f in enumerate(config.initial_excited) if f]
    if len(excited) > 1:
        raise ValueError("CIS reference supports at most one initially excited TLS")
    dim = 1 + n + (config.M)
    psi = np.zeros(dim, dtype=complex)
    if excited:
        psi[1 + excited[0]] = 1.0
    else:
        psi[0] = 1.0
    return CisState(psi, n)


def propagate_cis(ham: CisHamiltonian, psi0: CisState, t: float | np.ndarray):
    """exp(-i H t) |psi0> through the cached eigenbasis.

    For scalar t returns a CisState; for an array of times returns the complex
    amplitude matrix with shape (len(t), dim).
    """
    w = ham.evecs.conj().T @ psi0.amplitudes
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    phases = np.exp(-1j * np.outer(t_arr, ham.evals))
    out = (phases * w) @ ham.evecs.T
    if np.isscalar(t) or np.asarray(t).ndim == 0:
        return CisState(out[0], psi0.n_tls)
    return out


def cis_population(psi: CisState, alpha: int) -> float:
    """Excited-state population |c_alpha|^2 of one TLS."""
    if not 0 <= alpha < psi.n_tls:
        raise IndexError(f"TLS index {alpha} out of range")
    return float(np.abs(psi.c_tls[alpha]) ** 2)


def cis_intensity(psi: CisState, basis: ModeBasis, r: np.ndarray) -> np.ndarray:
    """Normal-ordered intensity I(r) = 2 |sum_j eps_j sin(k_j r) d_j|^2.

    This is the full normal-ordered field expectation evaluated in the
    single-excitation sector, where the two-photon matrix elements vanish.
    """
    f = (psi.d_modes * basis.eps) @ basis.sin_table(np.asarray(r, dtype=float))
    return 2.0 * np.abs(f) ** 2


def population_series(config: SystemConfig, times: np.ndarray,
                      basis: ModeBasis | None = None):
    """rho_ee(t) for every TLS on the given time grid; returns (pops, ham, amps).

    pops has shape (len(times), n_tls); amps holds the raw amplitude matrix so
    callers can also evaluate fields at selected times.
    """
    basis = basis if basis is not None else mode_basis_for(config)
    ham = build_cis_hamiltonian(config, basis)
    psi0 = initial_state(config)
    amps = propagate_cis(ham, psi0, np.asarray(times, dtype=float))
    pops = np.abs(amps[:, 1:1 + config.n_tls]) ** 2
    return pops, ham, amps
