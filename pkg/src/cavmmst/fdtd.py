"""Split-operator FDTD propagator: Yee-grid Maxwell + unitary electronic steps.

The kernel loop lives in cavmmst.kernels; this module prepares initial Yee
fields from sampled mode coordinates, builds the polarization-profile windows,
and exposes the per-trajectory plan used by the ensemble runner.

Yee layout: E_z on integer points k (time half-integers), B_y on k+1/2 (time
integers).  E and the amplitudes start at t = dt/2, B at t = dt, so after m
kernel steps the state is (E^(m+1/2), B^(m+1), psi^(m+1/2)).
"""

from __future__ import annotations

import numpy as np

from .kernels import active as _active_kernels
from .kernels import get_backend
from .model import ModeBasis, SystemConfig, profile_window
from .sampling import SamplingOptions, draw_trajectory

__all__ = ["init_yee_fields", "current_density", "field_energy",
           "staggered_field_energy", "FdtdPlan"]


def init_yee_fields(x, p, basis: ModeBasis, config: SystemConfig):
    """Initial (E_z, B_y) from sampled mode coordinates.

    E_z(k) at t = dt/2 uses X_j directly; B_y(k+1/2) at t = dt uses P_j evolved
    freely for another half step, P -> P - omega^2 X dt/2.
    """
    r = config.r_grid
    amp = np.sqrt(2.0 / basis.L)
    ez = (amp * basis.omega * x) @ np.sin(np.outer(basis.k, r))
    p1 = p - basis.omega ** 2 * x * (0.5 * config.dt)
    rb = r[:-1] + 0.5 * config.dx
    by = (amp * p1) @ np.cos(np.outer(basis.k, rb))
    ez[0] = 0.0
    ez[-1] = 0.0
    return ez, by


def current_density(c, profiles, omega0: float):
    """J_z(r) = sum_alpha -2 omega0 Im(rho_ge) xi_alpha(r), rho_ge = c_g c_e*.

    `profiles` is an (n_tls, n_grid) array of full-grid densities; used by the
    unit tests, the kernels work on windowed profiles instead.
    """
    im = (c[:, 0] * np.conj(c[:, 1])).imag
    return (-2.0 * omega0 * im) @ profiles


def field_energy(ez, by, dx: float) -> float:
    """Plain field energy (1/2) Int (E^2 + B^2) dr on the staggered grids."""
    return 0.5 * dx * (float(np.sum(ez ** 2)) + float(np.sum(by ** 2)))


def staggered_field_energy(ez_prev, ez_next, by, dx: float) -> float:
    """Exact leapfrog invariant: (1/2) dx [sum E^(m-1/2) E^(m+1/2) + sum (B^m)^2]."""
    return 0.5 * dx * (float(ez_prev @ ez_next) + float(np.sum(by ** 2)))


def _profile_groups(config: SystemConfig):
    """Windowed profiles deduplicated by TLS position.

    Returns (tls_group, grp_start, grp_vals) where TLSs sharing a position map
    to one profile row; the kernels then deposit each group's summed current
    once per step.
    """
    groups: dict[float, int] = {}
    tls_group = np.zeros(config.n_tls, dtype=np.int64)
    starts, vals = [], []
    for a, pos in enumerate(config.positions):
        if pos not in groups:
            groups[pos] = len(starts)
            s, v = profile_window(config, a)
            starts.append(s)
            vals.append(v)
        tls_group[a] = groups[pos]
    w = max(len(v) for v in vals)
    grp_vals = np.zeros((len(vals), w))
    for i, v in enumerate(vals):
        grp_vals[i, :len(v)] = v
    return tls_group, np.asarray(starts, dtype=np.int64), grp_vals


class FdtdPlan:
    """Per-run immutable tables + a per-trajectory entry point for the runner."""

    t_offset = None  # set in __init__: FDTD samples live at (m + 1/2) dt

    def __init__(self, config: SystemConfig, basis: ModeBasis,
                 options: SamplingOptions, n_steps: int, rec_stride: int,
                 snap_steps: np.ndarray, backend: str = "active"):
        self.config = config
        self.basis = basis
        self.options = options
        self.n_steps = int(n_steps)
        self.rec_stride = int(rec_stride)
        self.snap_steps = np.asarray(snap_steps, dtype=np.int64)
        self.kernels = _active_kernels if backend == "active" else get_backend(backend)

        r = config.r_grid
        amp = np.sqrt(2.0 / basis.L)
        self._e_tab = np.ascontiguousarray((amp * basis.omega)[:, None] * np.sin(np.outer(basis.k, r)))
        rb = r[:-1] + 0.5 * config.dx
        self._b_tab = np.ascontiguousarray(amp * np.cos(np.outer(basis.k, rb)))
        self._w2dt = basis.omega ** 2 * (0.5 * config.dt)
        self.tls_group, self.grp_start, self.grp_vals = _profile_groups(config)

        self.n_rec = self.n_steps // self.rec_stride + 1
        self.rec_times = (np.arange(self.n_rec) * self.rec_stride + 0.5) * config.dt
        self.snap_times = (self.snap_steps + 0.5) * config.dt
        self.n_grid = config.N_grids

    def run_raw(self, master_seed: int, index: int):
        """Propagate one trajectory; returns (status, pops_rec, e_snaps)."""
        cfg = self.config
        (x, p), c = draw_trajectory(master_seed, index, self.basis,
                                    cfg.initial_excited, self.options)
        ez = x @ self._e_tab
        ez[0] = 0.0
        ez[-1] = 0.0
        by = (p - self._w2dt * x) @ self._b_tab
        c = np.ascontiguousarray(c)
        pops = np.empty((self.n_rec, cfg.n_tls, 2))
        esnaps = np.empty((len(self.snap_steps), self.n_grid))
        bsnaps = np.empty((len(self.snap_steps), self.n_grid - 1))
        status = self.kernels.fdtd_trajectory(
            ez, by, c, self.tls_group, self.grp_start, self.grp_vals,
            cfg.omega0, cfg.dt, cfg.dx, self.n_steps, self.rec_stride,
            pops, self.snap_steps, esnaps, bsnaps)
        return status, pops, esnaps

    def snaps_to_esq(self, snaps: np.ndarray) -> np.ndarray:
        """E snapshots are already on the grid; intensity sample is E^2."""
        return snaps ** 2
