"""Rate fitting, superradiance reference curves and delay-time statistics."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

__all__ = [
    "FitError",
    "FitResult",
    "DelayStatistics",
    "fit_exponential",
    "fit_biexponential",
    "dicke_meanfield_curve",
    "numerical_derivative",
    "delay_time",
    "delay_statistics",
    "linear_fit",
    "intensity_wavefront",
]


class FitError(ValueError):
    """Series unusable for the requested fit."""


@dataclass
class FitResult:
    model: str
    params: dict
    window: tuple
    residual: float
    converged: bool = True
    degenerate: bool = False

    @property
    def k(self) -> float:
        return self.params["k"]


@dataclass
class DelayStatistics:
    delays: np.ndarray
    mean: float
    std: float
    ref_mean: float
    ref_std: float


def fit_exponential(t, y, window) -> FitResult:
    """k from a least-squares line through log y on the window."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    lo, hi = window
    mask = (t >= lo) & (t <= hi)
    if mask.sum() < 2:
        raise FitError(f"window {window} selects fewer than two samples")
    if np.any(y[mask] <= 0):
        raise FitError("non-positive values inside the fit window")
    slope, intercept = np.polyfit(t[mask], np.log(y[mask]), 1)
    resid = np.log(y[mask]) - (slope * t[mask] + intercept)
    return FitResult(model="single-exp",
                     params={"k": -slope, "amplitude": float(np.exp(intercept))},
                     window=(float(lo), float(hi)),
                     residual=float(np.sqrt(np.mean(resid ** 2))))


def _biexp(t, a, ks, kf):
    return a * np.exp(-ks * t) + (1.0 - a) * np.exp(-kf * t)


def fit_biexponential(t, y, n_starts: int = 8, window=None) -> FitResult:
    """A exp(-k_s t) + (1-A) exp(-k_f t) by multi-start Nelder-Mead.

    Returns the best-residual fit with k_s <= k_f; a near-degenerate result
    (rates within 5% or A pinned at 0/1) is flagged, not rejected.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if window is not None:
        mask = (t >= window[0]) & (t <= window[1])
        t, y = t[mask], y[mask]
    if len(t) < 10:
        raise FitError("need at least 10 samples for a biexponential fit")

    # crude early/late rate guesses to seed the starts
    pos = y > 0
    k_guess = 1.0
    if pos.sum() >= 4:
        tp, lp = t[pos], np.log(y[pos])
        n4 = max(2, pos.sum() // 4)
        k_early = max((lp[0] - lp[n4 - 1]) / max(tp[n4 - 1] - tp[0], 1e-12), 1e-3)
        k_late = max((lp[-n4] - lp[-1]) / max(tp[-1] - tp[-n4], 1e-12), 1e-3)
        k_guess = np.sqrt(k_early * k_late)
    else:
        k_early = k_late = k_guess

    def objective(theta):
        a = 0.5 * (1.0 + np.tanh(theta[0]))
        return float(np.sum((_biexp(t, a, np.exp(theta[1]), np.exp(theta[2])) - y) ** 2))

    starts = []
    for a0 in (0.2, 0.5, 0.8):
        starts.append([np.arctanh(2 * a0 - 1), np.log(k_late), np.log(max(k_early, 1.01 * k_late))])
    for f in (0.3, 3.0):
        starts.append([0.0, np.log(k_guess * f / 3), np.log(k_guess * f)])
    starts.append([0.0, np.log(k_guess), np.log(k_guess)])
    for f in (0.1, 10.0):
        starts.append([0.0, np.log(k_guess), np.log(k_guess * f)])
    starts = starts[:n_starts]

    best, best_val, converged = None, np.inf, False
    for s in starts:
        res = minimize(objective, s, method="Nelder-Mead",
                       options={"xatol": 1e-8, "fatol": 1e-14, "maxiter": 4000})
        if res.fun < best_val:
            best, best_val, converged = res.x, res.fun, bool(res.success)

    a = 0.5 * (1.0 + np.tanh(best[0]))
    ks, kf = np.exp(best[1]), np.exp(best[2])
    if ks > kf:
        ks, kf = kf, ks
        a = 1.0 - a
    degenerate = (kf - ks) / kf < 0.05 or a < 0.02 or a > 0.98
    return FitResult(model="bi-exp",
                     params={"A": float(a), "k_s": float(ks), "k_f": float(kf),
                             "k": float(ks)},
                     window=(float(t[0]), float(t[-1])),
                     residual=float(np.sqrt(best_val / len(t))),
                     converged=converged, degenerate=degenerate)


def dicke_meanfield_curve(n_tls: int, k: float, t_delay: float, t) -> np.ndarray:
    """Mean-field superradiance burst (k N / 4) sech^2(k N (t - t_D) / 2)."""
    t = np.asarray(t, dtype=float)
    return (k * n_tls / 4.0) / np.cosh(0.5 * k * n_tls * (t - t_delay)) ** 2


def numerical_derivative(t, y, smooth: float = 0.0) -> np.ndarray:
    """Centered differences after moving-average smoothing of width `smooth`
    (in time units; 0 disables smoothing)."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    dt = t[1] - t[0]
    if not np.allclose(np.diff(t), dt, rtol=1e-6):
        raise ValueError("numerical_derivative requires a uniform time grid")
    if smooth > 0:
        n = int(round(smooth / dt))
        n += (n + 1) % 2  # odd width
        if n > len(y):
            raise ValueError(f"smoothing window ({n} samples) exceeds series length {len(y)}")
        if n >= 3:
            pad = n // 2
            ypad = np.pad(y, pad, mode="edge")
            y = np.convolve(ypad, np.ones(n) / n, mode="valid")
    return np.gradient(y, dt)


def delay_time(t, rho_bar, smooth: float = 0.05, window=None):
    """Emission-burst time: argmax of -d rho_bar/dt after smoothing.

    Returns None when the series shows no decay inside the window (flat or
    rising), which callers report as a missing delay.
    """
    t = np.asarray(t, dtype=float)
    d = -numerical_derivative(t, rho_bar, smooth=smooth)
    if window is not None:
        mask = (t >= window[0]) & (t <= window[1])
        if not mask.any():
            return None
        d = np.where(mask, d, -np.inf)
    i = int(np.argmax(d))
    if not np.isfinite(d[i]) or d[i] <= 0:
        return None
    return float(t[i])


def delay_statistics(delays, n_tls: int, k: float) -> DelayStatistics:
    """Sample mean/std of the delays next to the quantum reference values
    <t_D> = (1/(N k)) sum_{s<=N} 1/s and Dt_D = (1/(N k)) sqrt(sum 1/s^2)."""
    delays = np.asarray(delays, dtype=float)
    if delays.size < 2:
        raise FitError("need at least two delay samples")
    s = np.arange(1, n_tls + 1, dtype=float)
    ref_mean = np.sum(1.0 / s) / (n_tls * k)
    ref_std = np.sqrt(np.sum(1.0 / s ** 2)) / (n_tls * k)
    return DelayStatistics(delays=delays, mean=float(delays.mean()),
                           std=float(delays.std(ddof=1)),
                           ref_mean=float(ref_mean), ref_std=float(ref_std))


def linear_fit(x, y):
    """Least-squares line; returns (slope, intercept, r_squared)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    pred = slope * x + intercept
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r2


def intensity_wavefront(r, intensity, r_source: float, smooth_cells: int = 2):
    """Outward wavefront edges of an emitted intensity profile.

    Locates the steepest outward-facing intensity edge on each side of the
    source: the most negative d I/dr for r > r_source and the most positive
    for r < r_source.  Returns (r_left, r_right).
    """
    r = np.asarray(r, dtype=float)
    prof = np.asarray(intensity, dtype=float)
    if smooth_cells > 0:
        n = 2 * smooth_cells + 1
        prof = np.convolve(np.pad(prof, smooth_cells, mode="edge"),
                           np.ones(n) / n, mode="valid")
    grad = np.gradient(prof, r)
    right = r > r_source
    left = r < r_source
    idx_r = np.flatnonzero(right)[np.argmin(grad[right])]
    idx_l = np.flatnonzero(left)[np.argmax(grad[left])]
    return float(r[idx_l]), float(r[idx_r])
