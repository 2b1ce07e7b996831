"""Physical model: cavity geometry, mode basis, couplings and derived rates.

Natural units are hard-wired throughout: hbar = c = epsilon_0 = mu_0 = 1.
Everything downstream (propagators, estimators, analysis) shares the objects
built here; they are immutable after construction and safe to pass between
workers.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ConfigurationError",
    "SystemConfig",
    "ModeBasis",
    "build_mode_basis",
    "coupling_matrix",
    "coupling_constant",
    "fgr_rate",
    "polarization_profile",
    "profile_window",
]


class ConfigurationError(ValueError):
    """Invalid physical or numerical configuration."""


@dataclass(frozen=True)
class SystemConfig:
    """Single source of truth for one simulation scenario.

    Attributes
    ----------
    L : cavity length.
    M : number of photon modes kept in the basis.
    omega0 : transition frequency shared by all TLSs.
    mu_ge : transition dipole magnitude (one value per system).
    positions : TLS locations, all strictly inside (0, L).
    initial_excited : per-TLS flag, True = starts in the excited state.
    N_grids : number of spatial grid points (Yee E-grid).
    dt_divisor : time step is dx / dt_divisor (c = 1).
    sigma : Gaussian width of the polarization density.
    gamma : electronic zero-point parameter for action-window sampling.
    t_final : end time of the simulation.
    mode_center : if set, the M modes are the contiguous block of the
        cavity ladder centered at this frequency instead of j = 1..M.
    """

    L: float = 2.0 * np.pi
    M: int = 400
    omega0: float = 100.0
    mu_ge: float = np.sqrt(np.pi) / 10.0
    positions: tuple = (np.pi,)
    initial_excited: tuple = (True,)
    N_grids: int = 5001
    dt_divisor: float = 2.0
    sigma: float = 1.0e-3
    gamma: float = 0.45
    t_final: float = 3.0 * np.pi
    mode_center: float | None = None

    def __post_init__(self):
        if self.L <= 0:
            raise ConfigurationError(f"cavity length must be positive, got {self.L}")
        if self.M < 1:
            raise ConfigurationError(f"need at least one photon mode, got {self.M}")
        if self.N_grids < 3:
            raise ConfigurationError(f"need at least 3 grid points, got {self.N_grids}")
        if not 0.0 <= self.gamma <= 0.5:
            raise ConfigurationError(f"gamma must lie in [0, 0.5], got {self.gamma}")
        if self.sigma <= 0:
            raise ConfigurationError(f"sigma must be positive, got {self.sigma}")
        if self.dt_divisor < 1.0:
            raise ConfigurationError(
                f"dt_divisor < 1 violates the CFL bound c*dt <= dx (got {self.dt_divisor})")
        if len(self.positions) != len(self.initial_excited):
            raise ConfigurationError("positions and initial_excited lengths differ")
        if len(self.positions) == 0:
            raise ConfigurationError("at least one TLS is required")
        for r in self.positions:
            if not 0.0 < r < self.L:
                raise ConfigurationError(f"TLS position {r} outside the open cavity (0, {self.L})")
        object.__setattr__(self, "positions", tuple(float(r) for r in self.positions))
        object.__setattr__(self, "initial_excited", tuple(bool(b) for b in self.initial_excited))

    @property
    def n_tls(self) -> int:
        return len(self.positions)

    @property
    def dx(self) -> float:
        return self.L / (self.N_grids - 1)

    @property
    def dt(self) -> float:
        return self.dx / self.dt_divisor

    @property
    def r_grid(self) -> np.ndarray:
        return np.linspace(0.0, self.L, self.N_grids)


@dataclass(frozen=True)
class ModeBasis:
    """Standing-wave photon modes of the perfect 1D cavity.

    omega_j = j*pi*c/L for the ladder indices stored in j_index, k_j = omega_j/c
    and eps_j = sqrt(omega_j / L) in natural units.
    """

    L: float
    j_index: np.ndarray
    omega: np.ndarray = field(init=False)
    k: np.ndarray = field(init=False)
    eps: np.ndarray = field(init=False)

    def __post_init__(self):
        j = np.asarray(self.j_index, dtype=np.int64)
        if j.size < 1 or np.any(j < 1):
            raise ConfigurationError("mode ladder indices must be >= 1")
        omega = j * (np.pi / self.L)
        object.__setattr__(self, "j_index", j)
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "k", omega.copy())
        object.__setattr__(self, "eps", np.sqrt(omega / self.L))

    @property
    def M(self) -> int:
        return self.j_index.size

    def sin_table(self, r: np.ndarray) -> np.ndarray:
        """sin(k_j r) with shape (M, len(r))."""
        return np.sin(np.outer(self.k, r))

    def vacuum_intensity_baseline(self, r: np.ndarray) -> np.ndarray:
        """eps0 * sum_j eps_j^2 sin^2(k_j r): the sampled-ZPE intensity floor."""
        return (self.eps[:, None] ** 2 * self.sin_table(r) ** 2).sum(axis=0)


def build_mode_basis(L: float, M: int, center: float | None = None) -> ModeBasis:
    """Photon-mode ladder of the cavity.

    With center=None the modes are j = 1..M.  Otherwise the M contiguous
    ladder modes bracketing the frequency `center` are selected (used for the
    reduced-basis studies).
    """
    if L <= 0:
        raise ConfigurationError(f"cavity length must be positive, got {L}")
    if M < 1:
        raise ConfigurationError(f"need at least one photon mode, got {M}")
    if center is None:
        j = np.arange(1, M + 1, dtype=np.int64)
    else:
        j0 = int(round(center * L / np.pi))
        start = max(1, j0 - M // 2 + 1)
        j = np.arange(start, start + M, dtype=np.int64)
    return ModeBasis(L=float(L), j_index=j)


def mode_basis_for(config: SystemConfig) -> ModeBasis:
    return build_mode_basis(config.L, config.M, config.mode_center)


def coupling_matrix(config: SystemConfig, basis: ModeBasis | None = None) -> np.ndarray:
    """g[alpha, j] = sqrt(omega_j / L) * mu_ge * sin(k_j r_alpha), shape (N, M)."""
    basis = basis if basis is not None else mode_basis_for(config)
    r = np.asarray(config.positions)
    return np.sqrt(basis.omega / basis.L) * config.mu_ge * np.sin(np.outer(r, basis.k))


def coupling_constant(config: SystemConfig, alpha: int, j: int,
                      basis: ModeBasis | None = None) -> float:
    """Single light-matter coupling entry; j indexes the stored basis (0-based)."""
    basis = basis if basis is not None else mode_basis_for(config)
    if not 0 <= alpha < config.n_tls:
        raise IndexError(f"TLS index {alpha} out of range")
    if not 0 <= j < basis.M:
        raise IndexError(f"mode index {j} out of range")
    r = config.positions[alpha]
    return float(np.sqrt(basis.omega[j] / basis.L) * config.mu_ge * np.sin(basis.k[j] * r))


def fgr_rate(omega0: float, mu_ge: float) -> float:
    """1D free-space golden-rule decay rate, omega0 * mu_ge^2 in natural units."""
    if omega0 < 0:
        raise ConfigurationError("transition frequency must be non-negative")
    return omega0 * mu_ge * mu_ge


def polarization_profile(config: SystemConfig, alpha: int,
                         r: np.ndarray | None = None) -> np.ndarray:
    """Spatial polarization density xi_alpha on the grid.

    A Gaussian of width sigma centered on the TLS, renormalized so that its
    trapezoid integral over the grid equals mu_ge exactly.  The discrete
    renormalization keeps the source strength correct even when sigma is not
    resolved by the grid (a warning is emitted in that case and the profile
    degrades gracefully toward a grid delta).
    """
    if not 0 <= alpha < config.n_tls:
        raise IndexError(f"TLS index {alpha} out of range")
    r = config.r_grid if r is None else np.asarray(r, dtype=float)
    dx = r[1] - r[0]
    if config.sigma < dx:
        warnings.warn(
            f"polarization width sigma={config.sigma:g} is below the grid "
            f"spacing dx={dx:g}; source is under-resolved", stacklevel=2)
    g = np.exp(-0.5 * ((r - config.positions[alpha]) / config.sigma) ** 2)
    norm = np.trapezoid(g, dx=dx)
    return config.mu_ge * g / norm


def profile_window(config: SystemConfig, alpha: int) -> tuple[int, np.ndarray]:
    """Compact support of xi_alpha on the Yee grid: (start index, values).

    The window spans +-max(10 sigma, 5 dx) around the TLS; the values are
    renormalized on the window so the windowed trapezoid integral is mu_ge.
    """
    r = config.r_grid
    dx = config.dx
    half = max(10.0 * config.sigma, 5.0 * dx)
    lo = max(1, int(np.floor((config.positions[alpha] - half) / dx)))
    hi = min(config.N_grids - 2, int(np.ceil((config.positions[alpha] + half) / dx)))
    seg = r[lo:hi + 1]
    g = np.exp(-0.5 * ((seg - config.positions[alpha]) / config.sigma) ** 2)
    norm = np.trapezoid(g, dx=dx)
    return lo, np.ascontiguousarray(config.mu_ge * g / norm)
