# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled trajectory kernels.  Semantics identical to pykernels (the
pure-numpy reference); see that module for the algorithm description."""

import numpy as np

from libc.math cimport cos, sin, isnan

cdef enum:
    NAN_CHECK_EVERY = 256


cdef inline void _record(double[:, :, ::1] pops, Py_ssize_t i,
                         double complex[:, ::1] c, Py_ssize_t n_tls) nogil:
    cdef Py_ssize_t a
    for a in range(n_tls):
        pops[i, a, 0] = c[a, 0].real * c[a, 0].real + c[a, 0].imag * c[a, 0].imag
        pops[i, a, 1] = c[a, 1].real * c[a, 1].real + c[a, 1].imag * c[a, 1].imag


cdef inline void _sigma_x_rot(double complex[:, ::1] c, Py_ssize_t a,
                              double theta) nogil:
    cdef double ct = cos(theta)
    cdef double st = sin(theta)
    cdef double complex cg = c[a, 0]
    cdef double complex ce = c[a, 1]
    c[a, 0] = ct * cg - 1j * st * ce
    c[a, 1] = ct * ce - 1j * st * cg


def fdtd_trajectory(double[::1] ez, double[::1] by, double complex[:, ::1] c,
                    long[::1] tls_group, long[::1] grp_start, double[:, ::1] grp_vals,
                    double omega0, double dt, double dx,
                    long n_steps, long rec_stride,
                    double[:, :, ::1] pops,
                    long[::1] snap_steps, double[:, ::1] esnaps, double[:, ::1] bsnaps):
    cdef Py_ssize_t n_grid = ez.shape[0]
    cdef Py_ssize_t n_tls = c.shape[0]
    cdef Py_ssize_t n_grp = grp_start.shape[0]
    cdef Py_ssize_t w = grp_vals.shape[1]
    cdef Py_ssize_t n_snap = snap_steps.shape[0]
    cdef double lam = dt / dx
    cdef double hp_re = cos(0.5 * omega0 * dt)
    cdef double hp_im = sin(0.5 * omega0 * dt)
    cdef double ph_re = cos(0.5 * omega0 * dt)
    cdef double ph_im = -sin(0.5 * omega0 * dt)

    work = np.zeros((3, max(n_grp, 1) * max(w, 1)))
    cdef double[:, ::1] wk = work
    cdef Py_ssize_t m, a, g, k, s0, snap_i
    cdef long status = 0
    cdef double im_s, f, emid, theta
    cdef double complex rho, cg, ce, phase_e, phase_g

    phase_e = ph_re + 1j * ph_im
    phase_g = ph_re - 1j * ph_im

    _record(pops, 0, c, n_tls)
    snap_i = 0
    if n_snap > 0 and snap_steps[0] == 0:
        for k in range(n_grid):
            esnaps[0, k] = ez[k]
        for k in range(n_grid - 1):
            bsnaps[0, k] = by[k]
        snap_i = 1

    with nogil:
        for m in range(1, n_steps + 1):
            # group-summed Im(rho_ge) advanced by a free half step
            for g in range(n_grp):
                wk[0, g] = 0.0
            for a in range(n_tls):
                rho = c[a, 0] * (c[a, 1].real - 1j * c[a, 1].imag)
                wk[0, tls_group[a]] += rho.real * hp_im + rho.imag * hp_re

            for g in range(n_grp):
                s0 = grp_start[g]
                for k in range(w):
                    wk[1, g * w + k] = ez[s0 + k]

            for k in range(1, n_grid - 1):
                ez[k] -= lam * (by[k] - by[k - 1])
            for g in range(n_grp):
                s0 = grp_start[g]
                im_s = 2.0 * omega0 * dt * wk[0, g]
                for k in range(w):
                    ez[s0 + k] += im_s * grp_vals[g, k]
            ez[0] = 0.0
            ez[n_grid - 1] = 0.0

            for g in range(n_grp):
                s0 = grp_start[g]
                f = 0.0
                for k in range(w):
                    emid = 0.5 * (wk[1, g * w + k] + ez[s0 + k])
                    f += emid * grp_vals[g, k]
                wk[2, g] = dx * f

            for a in range(n_tls):
                theta = 0.5 * dt * (-wk[2, tls_group[a]])
                _sigma_x_rot(c, a, theta)
                c[a, 1] = c[a, 1] * phase_e
                c[a, 0] = c[a, 0] * phase_g
                _sigma_x_rot(c, a, theta)

            for k in range(n_grid - 1):
                by[k] -= lam * (ez[k + 1] - ez[k])

            if m % rec_stride == 0:
                _record(pops, m / rec_stride, c, n_tls)
            if snap_i < n_snap and snap_steps[snap_i] == m:
                for k in range(n_grid):
                    esnaps[snap_i, k] = ez[k]
                for k in range(n_grid - 1):
                    bsnaps[snap_i, k] = by[k]
                snap_i += 1
            if m % NAN_CHECK_EVERY == 0 and (isnan(ez[1]) or isnan(c[0, 0].real)):
                status = m
                break

    if status:
        return status
    if np.any(np.isnan(np.asarray(ez))) or np.any(np.isnan(np.asarray(c))):
        return n_steps
    return 0


def modes_trajectory(double[::1] x, double[::1] p, double complex[:, ::1] c,
                     double[::1] omega, double[:, ::1] sq2wg,
                     double omega0, double dt, long n_steps, long rec_stride,
                     double[:, :, ::1] pops,
                     long[::1] snap_steps, double[:, ::1] xsnaps, double[:, ::1] psnaps):
    cdef Py_ssize_t n_modes = x.shape[0]
    cdef Py_ssize_t n_tls = c.shape[0]
    cdef Py_ssize_t n_snap = snap_steps.shape[0]
    cdef double ph_re = cos(0.5 * omega0 * dt)
    cdef double ph_im = -sin(0.5 * omega0 * dt)

    trig = np.zeros((2, n_modes))
    trig[0] = np.cos(np.asarray(omega) * dt)
    trig[1] = np.sin(np.asarray(omega) * dt)
    work = np.zeros(2 * max(n_tls, 1))
    cdef double[:, ::1] tg = trig
    cdef double[::1] wk = work
    cdef Py_ssize_t m, a, j, snap_i
    cdef long status = 0
    cdef double xj, pj, kick, theta
    cdef double complex phase_e, phase_g

    phase_e = ph_re + 1j * ph_im
    phase_g = ph_re - 1j * ph_im

    _record(pops, 0, c, n_tls)
    snap_i = 0
    if n_snap > 0 and snap_steps[0] == 0:
        for j in range(n_modes):
            xsnaps[0, j] = x[j]
            psnaps[0, j] = p[j]
        snap_i = 1

    with nogil:
        for m in range(1, n_steps + 1):
            # first half kick
            for a in range(n_tls):
                wk[a] = 2.0 * (c[a, 1].real * c[a, 0].real + c[a, 1].imag * c[a, 0].imag)
                wk[n_tls + a] = 0.0
            for j in range(n_modes):
                xj = x[j]
                kick = 0.0
                for a in range(n_tls):
                    kick += sq2wg[a, j] * wk[a]
                    wk[n_tls + a] += sq2wg[a, j] * xj
                p[j] += 0.5 * dt * kick
            for a in range(n_tls):
                theta = 0.5 * dt * (-wk[n_tls + a])
                _sigma_x_rot(c, a, theta)

            # exact free flow
            for j in range(n_modes):
                xj = x[j]
                pj = p[j]
                x[j] = tg[0, j] * xj + (tg[1, j] / omega[j]) * pj
                p[j] = tg[0, j] * pj - omega[j] * tg[1, j] * xj
            for a in range(n_tls):
                c[a, 1] = c[a, 1] * phase_e
                c[a, 0] = c[a, 0] * phase_g

            # second half kick
            for a in range(n_tls):
                wk[a] = 2.0 * (c[a, 1].real * c[a, 0].real + c[a, 1].imag * c[a, 0].imag)
                wk[n_tls + a] = 0.0
            for j in range(n_modes):
                xj = x[j]
                kick = 0.0
                for a in range(n_tls):
                    kick += sq2wg[a, j] * wk[a]
                    wk[n_tls + a] += sq2wg[a, j] * xj
                p[j] += 0.5 * dt * kick
            for a in range(n_tls):
                theta = 0.5 * dt * (-wk[n_tls + a])
                _sigma_x_rot(c, a, theta)

            if m % rec_stride == 0:
                _record(pops, m / rec_stride, c, n_tls)
            if snap_i < n_snap and snap_steps[snap_i] == m:
                for j in range(n_modes):
                    xsnaps[snap_i, j] = x[j]
                    psnaps[snap_i, j] = p[j]
                snap_i += 1
            if m % NAN_CHECK_EVERY == 0 and (isnan(x[0]) or isnan(c[0, 0].real)):
                status = m
                break

    if status:
        return status
    if np.any(np.isnan(np.asarray(x))) or np.any(np.isnan(np.asarray(c))):
        return n_steps
    return 0
