"""Trajectory-ensemble runner with streaming, mergeable statistics.

Trajectories are processed in fixed-size chunks; each chunk reduces its
members in index order and the chunk results are merged in chunk order.  The
reduction tree therefore does not depend on the worker count, which makes
ensemble output bitwise reproducible across 1, 4 or 16 workers.

Observables:
* raw populations (|c_g|^2, |c_e|^2) per TLS on a uniform output time grid,
* E^2 profiles at scheduled snapshot times,
* per-trajectory emission delay times,
* per-trajectory electronic actions (n_g, n_e) at scheduled times.

ZPE-subtracted estimators (population_estimate / intensity_estimate) are
applied on top of the accumulated raw means.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import analysis
from .fdtd import FdtdPlan
from .model import ModeBasis, SystemConfig, mode_basis_for
from .modes import ModesPlan
from .sampling import SamplingOptions

__all__ = [
    "ObservableSchedule",
    "EnsembleError",
    "EnsembleResult",
    "RunningMoments",
    "run_ensemble",
    "population_estimate",
    "intensity_estimate",
    "phase_space_export",
    "coarse_grain",
]

FAILURE_CAP = 1.0e-3


class EnsembleError(RuntimeError):
    """Run-level failure (too many broken trajectories, bad request...)."""


@dataclass(frozen=True)
class ObservableSchedule:
    """What to record during an ensemble run."""

    t_final: float
    pop_dt: float = 0.01
    snapshot_times: tuple = ()
    phase_space_times: tuple = ()
    record_delay: bool = False
    delay_smooth: float = 0.05
    delay_window: tuple | None = None

    @property
    def pop_times(self) -> np.ndarray:
        n = int(np.floor(self.t_final / self.pop_dt + 1e-9)) + 1
        return np.arange(n) * self.pop_dt


class RunningMoments:
    """Streaming mean/M2 over trajectories for one array-valued observable.

    merge() implements Chan's pairwise combination, so partial accumulators
    can be reduced in any grouping; identical grouping gives identical floats.
    """

    def __init__(self, shape):
        self.n = 0
        self.mean = np.zeros(shape)
        self.m2 = np.zeros(shape)

    def add_batch(self, batch: np.ndarray):
        """Fold in a stack of samples (first axis indexes trajectories)."""
        nb = batch.shape[0]
        if nb == 0:
            return
        bm = batch.mean(axis=0)
        bm2 = ((batch - bm) ** 2).sum(axis=0)
        self._combine(nb, bm, bm2)

    def merge(self, other: "RunningMoments"):
        self._combine(other.n, other.mean, other.m2)

    def _combine(self, nb, bm, bm2):
        if nb == 0:
            return
        if self.n == 0:
            self.n = nb
            self.mean = bm.copy()
            self.m2 = bm2.copy()
            return
        n = self.n + nb
        delta = bm - self.mean
        self.mean = self.mean + delta * (nb / n)
        self.m2 = self.m2 + bm2 + delta ** 2 * (self.n * nb / n)
        self.n = n

    @property
    def variance(self) -> np.ndarray:
        if self.n < 2:
            return np.full_like(self.mean, np.nan)
        return self.m2 / (self.n - 1)

    @property
    def sem(self) -> np.ndarray:
        return np.sqrt(self.variance / max(self.n, 1))


@dataclass
class EnsembleResult:
    config: SystemConfig
    options: SamplingOptions
    propagator: str
    master_seed: int
    n_requested: int
    times: np.ndarray
    pops: RunningMoments
    snapshot_times: np.ndarray
    esq: RunningMoments | None
    delays: np.ndarray
    delay_indices: np.ndarray
    phase_times: np.ndarray
    phase_points: np.ndarray
    phase_indices: np.ndarray
    failed_indices: list
    wall_time: float = 0.0

    @property
    def n_ok(self) -> int:
        return self.pops.n

    @property
    def pop_raw_e(self) -> np.ndarray:
        """<|c_e|^2>(t, alpha) without any ZPE subtraction."""
        return self.pops.mean[:, :, 1]

    @property
    def pop_sem_e(self) -> np.ndarray:
        return self.pops.sem[:, :, 1]


def _make_plan(propagator: str, config: SystemConfig, basis: ModeBasis,
               options: SamplingOptions, schedule: ObservableSchedule,
               backend: str):
    dt = config.dt
    n_steps = int(np.ceil(schedule.t_final / dt - 1e-9))
    rec_stride = max(1, int(np.floor(schedule.pop_dt / (2.0 * dt))))
    if n_steps % rec_stride:
        n_steps += rec_stride - (n_steps % rec_stride)
    if propagator == "fdtd":
        snap = np.clip(np.round(np.asarray(schedule.snapshot_times) / dt - 0.5),
                       0, n_steps).astype(np.int64)
        return FdtdPlan(config, basis, options, n_steps, rec_stride, snap, backend)
    if propagator == "modes":
        snap = np.clip(np.round(np.asarray(schedule.snapshot_times) / dt),
                       0, n_steps).astype(np.int64)
        return ModesPlan(config, basis, options, n_steps, rec_stride, snap, backend)
    raise EnsembleError(f"unknown propagator {propagator!r}; expected 'fdtd' or 'modes'")


def _interp_weights(rec_times: np.ndarray, out_times: np.ndarray):
    h = rec_times[1] - rec_times[0] if len(rec_times) > 1 else 1.0
    pos = (out_times - rec_times[0]) / h
    i = np.clip(np.floor(pos).astype(np.int64), 0, max(len(rec_times) - 2, 0))
    w = np.clip(pos - i, 0.0, 1.0)
    return i, w


def _chunk_worker(plan, master_seed, indices, schedule, pop_iw, phase_iw, gamma):
    """Run one chunk; returns per-chunk reductions (deterministic per chunk)."""
    pops_list, snaps_list, ok_idx = [], [], []
    failed = []
    for idx in indices:
        status, pops, snaps = plan.run_raw(master_seed, idx)
        if status != 0:
            failed.append((idx, status))
            continue
        pops_list.append(pops)
        snaps_list.append(snaps)
        ok_idx.append(idx)

    out = {"failed": failed, "ok_idx": ok_idx}
    if not ok_idx:
        out["n_ok"] = 0
        return out
    stack = np.stack(pops_list)
    i, w = pop_iw
    pop_sched = stack[:, i] * (1.0 - w)[:, None, None] + stack[:, i + 1] * w[:, None, None]
    out["n_ok"] = len(ok_idx)
    out["pop_mean"] = pop_sched.mean(axis=0)
    out["pop_m2"] = ((pop_sched - out["pop_mean"]) ** 2).sum(axis=0)

    if len(plan.snap_steps):
        esq = plan.snaps_to_esq(np.stack(snaps_list))
        out["esq_mean"] = esq.mean(axis=0)
        out["esq_m2"] = ((esq - out["esq_mean"]) ** 2).sum(axis=0)

    if len(phase_iw[0]):
        i, w = phase_iw
        out["phase"] = stack[:, i, 0] * (1.0 - w)[:, None] + stack[:, i + 1, 0] * w[:, None]

    if schedule.record_delay:
        t = schedule.pop_times
        rho_bar = pop_sched[:, :, :, 1].mean(axis=2) - (
            gamma if plan.options.sample_electronic else 0.0)
        delays = []
        for row in rho_bar:
            td = analysis.delay_time(t, row, smooth=schedule.delay_smooth,
                                     window=schedule.delay_window)
            delays.append(np.nan if td is None else td)
        out["delays"] = np.asarray(delays)
    return out


def run_ensemble(config: SystemConfig, options: SamplingOptions, n_traj: int,
                 master_seed: int, propagator: str, schedule: ObservableSchedule,
                 workers: int = 1, chunk_size: int = 64,
                 backend: str = "active") -> EnsembleResult:
    """Average observables over n_traj independent trajectories.

    Deterministic for fixed (config, options, n_traj, master_seed, propagator,
    schedule) regardless of `workers`.
    """
    if n_traj < 1:
        raise EnsembleError("need at least one trajectory")
    t_start = time.perf_counter()
    basis = mode_basis_for(config)
    plan = _make_plan(propagator, config, basis, options, schedule, backend)

    pop_times = schedule.pop_times
    pop_iw = _interp_weights(plan.rec_times, pop_times)
    phase_times = np.asarray(schedule.phase_space_times, dtype=float)
    phase_iw = _interp_weights(plan.rec_times, phase_times)

    chunks = [range(lo, min(lo + chunk_size, n_traj))
              for lo in range(0, n_traj, chunk_size)]
    args = (plan, master_seed)
    kwargs = (schedule, pop_iw, phase_iw, options.gamma)
    if workers <= 1:
        results = [_chunk_worker(*args, ch, *kwargs) for ch in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_chunk_worker, *args, ch, *kwargs) for ch in chunks]
            results = [f.result() for f in futures]

    pops = RunningMoments((len(pop_times), config.n_tls, 2))
    esq = RunningMoments((len(plan.snap_steps), config.N_grids)) if len(plan.snap_steps) else None
    delays, delay_idx, phase_rows, phase_idx, failed = [], [], [], [], []
    for res in results:
        failed.extend(res["failed"])
        if res["n_ok"] == 0:
            continue
        pops._combine(res["n_ok"], res["pop_mean"], res["pop_m2"])
        if esq is not None:
            esq._combine(res["n_ok"], res["esq_mean"], res["esq_m2"])
        if "phase" in res:
            phase_rows.append(res["phase"])
            phase_idx.extend(res["ok_idx"])
        if "delays" in res:
            ok = ~np.isnan(res["delays"])
            delays.extend(res["delays"][ok])
            delay_idx.extend(np.asarray(res["ok_idx"])[ok])

    if len(failed) > FAILURE_CAP * n_traj:
        raise EnsembleError(
            f"{len(failed)} of {n_traj} trajectories failed (> {FAILURE_CAP:.1%} cap); "
            f"first failures: {failed[:5]}")

    return EnsembleResult(
        config=config, options=options, propagator=propagator,
        master_seed=master_seed, n_requested=n_traj,
        times=pop_times, pops=pops,
        snapshot_times=plan.snap_times, esq=esq,
        delays=np.asarray(delays, dtype=float),
        delay_indices=np.asarray(delay_idx, dtype=np.int64),
        phase_times=phase_times,
        phase_points=(np.concatenate(phase_rows) if phase_rows
                      else np.zeros((0, len(phase_times), 2))),
        phase_indices=np.asarray(phase_idx, dtype=np.int64),
        failed_indices=[i for i, _ in failed],
        wall_time=time.perf_counter() - t_start,
    )


def population_estimate(result: EnsembleResult):
    """ZPE-corrected excited populations: <|c_e|^2> - gamma when the
    electronic ZPE was sampled, the raw average otherwise.

    Returns (times, rho_ee[t, alpha], sem[t, alpha]).
    """
    rho = result.pop_raw_e.copy()
    if result.options.sample_electronic:
        rho -= result.options.gamma
    return result.times, rho, result.pop_sem_e


def intensity_estimate(result: EnsembleResult, basis: ModeBasis | None = None,
                       coarse_cells: int = 0):
    """I(r, t) = eps0 <E^2> minus the sampled-vacuum baseline.

    The baseline sum runs over the sampled mode basis and is subtracted only
    when the photonic ZPE was sampled.  Optional coarse graining averages each
    point with its `coarse_cells` neighbors on each side.

    Returns (r, I[snap, r], sem[snap, r]).
    """
    if result.esq is None:
        raise EnsembleError("no intensity snapshots were scheduled")
    basis = basis if basis is not None else mode_basis_for(result.config)
    r = result.config.r_grid
    intensity = result.esq.mean.copy()
    sem = result.esq.sem
    if result.options.sample_photonic:
        intensity -= basis.vacuum_intensity_baseline(r)
    if coarse_cells > 0:
        intensity = coarse_grain(intensity, coarse_cells)
        sem = coarse_grain(sem, coarse_cells) / np.sqrt(2 * coarse_cells + 1)
    return r, intensity, sem


def coarse_grain(profile: np.ndarray, cells: int) -> np.ndarray:
    """Moving average over 2*cells+1 neighboring grid points (edge-clipped)."""
    n = 2 * cells + 1
    kernel = np.ones(n) / n
    pad = ((0, 0),) * (profile.ndim - 1) + ((cells, cells),)
    padded = np.pad(profile, pad, mode="edge")
    return np.apply_along_axis(lambda a: np.convolve(a, kernel, mode="valid"),
                               -1, padded)


def phase_space_export(result: EnsembleResult):
    """Flat per-trajectory (n_g, n_e) rows for each scheduled time.

    Returns a dict time -> array of shape (n_traj_ok, 3) with columns
    (trajectory index, n_g, n_e).
    """
    out = {}
    for ti, t in enumerate(result.phase_times):
        rows = np.column_stack([result.phase_indices.astype(float),
                                result.phase_points[:, ti, 0],
                                result.phase_points[:, ti, 1]])
        out[float(t)] = rows
    return out
