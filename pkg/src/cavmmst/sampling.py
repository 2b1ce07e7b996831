"""Per-trajectory initial conditions: photon vacuum and electronic window draws.

Each trajectory gets its own RNG stream derived from (master_seed, index), so
draws never depend on worker count or execution order.  The two sampling flags
select the method variant: both on = full quasiclassical sampling, both off =
a single deterministic mean-field (Ehrenfest) trajectory.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ModeBasis

__all__ = [
    "SamplingOptions",
    "trajectory_rng",
    "sample_photon_vacuum",
    "sample_electronic",
    "draw_trajectory",
]


@dataclass(frozen=True)
class SamplingOptions:
    sample_photonic: bool = True
    sample_electronic: bool = True
    gamma: float = 0.45

    def __post_init__(self):
        if not 0.0 <= self.gamma <= 0.5:
            raise ValueError(f"gamma must lie in [0, 0.5], got {self.gamma}")

    @classmethod
    def from_mode(cls, mode: str, gamma: float = 0.45) -> "SamplingOptions":
        table = {
            "both": (True, True),
            "electronic": (False, True),
            "photonic": (True, False),
            "none": (False, False),
        }
        if mode not in table:
            raise ValueError(f"unknown sampling mode {mode!r}; expected one of {sorted(table)}")
        ph, el = table[mode]
        return cls(sample_photonic=ph, sample_electronic=el, gamma=gamma)


def trajectory_rng(master_seed: int, index: int) -> np.random.Generator:
    """Independent, reproducible stream for one trajectory."""
    return np.random.default_rng([int(master_seed), int(index)])


def sample_photon_vacuum(rng: np.random.Generator, basis: ModeBasis,
                         options: SamplingOptions):
    """(X_j, P_j) from the vacuum Wigner distribution, or zeros if disabled.

    Var(X_j) = 1/(2 omega_j) and Var(P_j) = omega_j / 2, independent Gaussians.
    """
    if options.sample_photonic:
        x = rng.standard_normal(basis.M) / np.sqrt(2.0 * basis.omega)
        p = rng.standard_normal(basis.M) * np.sqrt(basis.omega / 2.0)
    else:
        x = np.zeros(basis.M)
        p = np.zeros(basis.M)
    return x, p


def sample_electronic(rng: np.random.Generator, initial_excited,
                      options: SamplingOptions) -> np.ndarray:
    """Complex (c_g, c_e) per TLS from action-angle window sampling.

    Actions are uniform on [n0_k, n0_k + 2 gamma] with angles uniform on
    [0, 2 pi); with sampling off the amplitudes are exactly (1, 0) or (0, 1).
    Returns an (n_tls, 2) complex array.
    """
    flags = np.asarray(initial_excited, dtype=bool)
    n_tls = flags.size
    c = np.zeros((n_tls, 2), dtype=complex)
    if options.sample_electronic:
        n0 = np.zeros((n_tls, 2))
        n0[~flags, 0] = 1.0
        n0[flags, 1] = 1.0
        actions = n0 + 2.0 * options.gamma * rng.random((n_tls, 2))
        angles = 2.0 * np.pi * rng.random((n_tls, 2))
        c[:] = np.sqrt(actions) * np.exp(1j * angles)
    else:
        c[~flags, 0] = 1.0
        c[flags, 1] = 1.0
    return c


def draw_trajectory(master_seed: int, index: int, basis: ModeBasis,
                    initial_excited, options: SamplingOptions):
    """All initial data for trajectory `index`: ((X, P), amplitudes).

    Draw order is fixed (photons first, then electrons) so streams are stable.
    """
    rng = trajectory_rng(master_seed, index)
    xp = sample_photon_vacuum(rng, basis, options)
    c = sample_electronic(rng, initial_excited, options)
    return xp, c
