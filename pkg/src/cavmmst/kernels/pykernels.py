"""Pure-numpy trajectory kernels: the fallback backend.

Semantics here define the contract that the compiled backend mirrors:

* ``fdtd_trajectory`` advances one split-operator FDTD trajectory.  State
  convention after m steps: E at (m+1/2)dt, B at (m+1)dt, amplitudes at
  (m+1/2)dt.  Field update pair (consistent with the standing-wave mode
  convention used for initialization):

      E_k   <- E_k - (dt/dx) (B_{k+1/2} - B_{k-1/2}) - J_k dt,   E_0 = E_{G-1} = 0
      B_{k+1/2} <- B_{k+1/2} - (dt/dx) (E_{k+1} - E_k)

  with the mean-field current J = -2 omega0 Im(rho_ge) xi(r), rho_ge advanced
  by a free half step so the deposit is time-centered.  The electronic update
  is the unitary sandwich exp(-iV dt/2) exp(-iH_s dt) exp(-iV dt/2) with
  V = -Int E xi dr (sigma_+ + sigma_-) using the time-centered field.

* ``modes_trajectory`` advances photon-mode coordinates with Strang splitting:
  exact half coupling kick, exact harmonic rotation and electronic phases,
  exact half coupling kick.  The kick uses P_j += (dt/2) sqrt(2 w_j) g_j^(a)
  * 2 Re(c_e* c_g), which is constant during the kick because the sigma_x
  rotation it generates preserves Re(c_e* c_g).

Both record raw populations (|c_g|^2, |c_e|^2) every ``rec_stride`` steps
(including step 0) and copy field state at the requested step indices.
Return value: 0 on success, or the 1-based step index at which a NaN was
detected (the trajectory is then abandoned).
"""

from __future__ import annotations

import numpy as np

NAN_CHECK_EVERY = 256


def _record(pops, i, c):
    pops[i, :, 0] = np.abs(c[:, 0]) ** 2
    pops[i, :, 1] = np.abs(c[:, 1]) ** 2


def _sigma_x_rotation(c, theta):
    """c <- exp(-i theta sigma_x) c, per TLS; theta has shape (n_tls,)."""
    ct = np.cos(theta)
    st = np.sin(theta)
    cg = ct * c[:, 0] - 1j * st * c[:, 1]
    ce = ct * c[:, 1] - 1j * st * c[:, 0]
    c[:, 0] = cg
    c[:, 1] = ce


def fdtd_field_step(ez, by, lam, jz_dt=None):
    """One leapfrog field update; jz_dt is the pre-multiplied J*dt profile."""
    ez[1:-1] -= lam * (by[1:] - by[:-1])
    if jz_dt is not None:
        ez[1:-1] -= jz_dt[1:-1]
    ez[0] = 0.0
    ez[-1] = 0.0
    by -= lam * (ez[1:] - ez[:-1])


def electronic_sandwich(c, v, omega0, dt):
    """exp(-iV dt/2) exp(-iH_s dt) exp(-iV dt/2) with V = v sigma_x per TLS."""
    theta = 0.5 * dt * v
    _sigma_x_rotation(c, theta)
    phase = np.exp(-0.5j * omega0 * dt)
    c[:, 1] *= phase
    c[:, 0] *= np.conj(phase)
    _sigma_x_rotation(c, theta)


def fdtd_trajectory(ez, by, c, tls_group, grp_start, grp_vals, omega0, dt, dx,
                    n_steps, rec_stride, pops, snap_steps, esnaps, bsnaps):
    lam = dt / dx
    n_grp = grp_start.shape[0]
    w = grp_vals.shape[1]
    half_phase = np.exp(0.5j * omega0 * dt)
    n_snap = snap_steps.shape[0]

    _record(pops, 0, c)
    snap_i = 0
    if n_snap and snap_steps[0] == 0:
        esnaps[0] = ez
        bsnaps[0] = by
        snap_i = 1

    for m in range(1, n_steps + 1):
        # time-centered mean-field current, summed per profile group
        rho_adv = c[:, 0] * np.conj(c[:, 1]) * half_phase
        im_sum = np.zeros(n_grp)
        np.add.at(im_sum, tls_group, rho_adv.imag)

        e_old = np.empty((n_grp, w))
        for g in range(n_grp):
            e_old[g] = ez[grp_start[g]:grp_start[g] + w]

        ez[1:-1] -= lam * (by[1:] - by[:-1])
        for g in range(n_grp):
            ez[grp_start[g]:grp_start[g] + w] += (2.0 * omega0 * dt * im_sum[g]) * grp_vals[g]
        ez[0] = 0.0
        ez[-1] = 0.0

        # coupling integral with the field at the half-step midpoint
        f_grp = np.empty(n_grp)
        for g in range(n_grp):
            e_mid = 0.5 * (e_old[g] + ez[grp_start[g]:grp_start[g] + w])
            f_grp[g] = dx * float(e_mid @ grp_vals[g])
        electronic_sandwich(c, -f_grp[tls_group], omega0, dt)

        by -= lam * (ez[1:] - ez[:-1])

        if m % rec_stride == 0:
            _record(pops, m // rec_stride, c)
        if snap_i < n_snap and snap_steps[snap_i] == m:
            esnaps[snap_i] = ez
            bsnaps[snap_i] = by
            snap_i += 1
        if m % NAN_CHECK_EVERY == 0 and (np.isnan(ez[1]) or np.isnan(c[0, 0])):
            return m
    if np.any(np.isnan(ez)) or np.any(np.isnan(c)):
        return n_steps
    return 0


def modes_trajectory(x, p, c, omega, sq2wg, omega0, dt, n_steps,
                     rec_stride, pops, snap_steps, xsnaps, psnaps):
    cos_wdt = np.cos(omega * dt)
    sin_wdt = np.sin(omega * dt)
    n_snap = snap_steps.shape[0]

    def half_kick():
        re2 = 2.0 * (np.conj(c[:, 1]) * c[:, 0]).real
        v = -(sq2wg @ x)
        p += (0.5 * dt) * (re2 @ sq2wg)
        _sigma_x_rotation(c, 0.5 * dt * v)

    _record(pops, 0, c)
    snap_i = 0
    if n_snap and snap_steps[0] == 0:
        xsnaps[0] = x
        psnaps[0] = p
        snap_i = 1

    phase = np.exp(-0.5j * omega0 * dt)
    for m in range(1, n_steps + 1):
        half_kick()
        x_new = cos_wdt * x + (sin_wdt / omega) * p
        p_new = cos_wdt * p - (omega * sin_wdt) * x
        x[:] = x_new
        p[:] = p_new
        c[:, 1] *= phase
        c[:, 0] *= np.conj(phase)
        half_kick()

        if m % rec_stride == 0:
            _record(pops, m // rec_stride, c)
        if snap_i < n_snap and snap_steps[snap_i] == m:
            xsnaps[snap_i] = x
            psnaps[snap_i] = p
            snap_i += 1
        if m % NAN_CHECK_EVERY == 0 and (np.isnan(x[0]) or np.isnan(c[0, 0])):
            return m
    if np.any(np.isnan(x)) or np.any(np.isnan(c)):
        return n_steps
    return 0
