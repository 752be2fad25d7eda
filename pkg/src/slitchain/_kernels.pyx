# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled semi-Lagrangian kernels: conservative PPM flux-form remap with a
mean-preserving positivity limiter.

Must stay numerically identical to _kernels_py; test_kernels checks both.
"""

import numpy as np

from libc.math cimport floor

COMPILED = True


cdef inline void _ppm_cell(double eL, double a, double eR,
                           double* aL, double* d, double* a6) nogil:
    cdef double l = eL if eL > 0.0 else 0.0
    cdef double r = eR if eR > 0.0 else 0.0
    cdef double dd = r - l
    cdef double c6 = 6.0 * a - 3.0 * (l + r)
    cdef double xs, ps, mn, sigma, den
    if c6 != 0.0:
        xs = (dd + c6) / (2.0 * c6)
    else:
        xs = -1.0
    mn = l if l < r else r
    if 0.0 < xs < 1.0:
        ps = l + xs * (dd + c6 * (1.0 - xs))
        if ps < mn:
            mn = ps
    if mn < 0.0:
        den = a - mn
        if den < 1e-300:
            den = 1e-300
        sigma = a / den
        l = a + sigma * (l - a)
        r = a + sigma * (r - a)
        dd = r - l
        c6 = sigma * c6
    aL[0] = l
    d[0] = dd
    a6[0] = c6


cdef inline double _right_integral(double aR, double d, double a6,
                                   double theta) nogil:
    return theta * (aR - 0.5 * theta * (d - a6 * (1.0 - (2.0 / 3.0) * theta)))


cdef inline Py_ssize_t _wrap(Py_ssize_t k, Py_ssize_t n) nogil:
    # C remainder keeps the sign of the dividend; normalize to [0, n)
    k = k % n
    if k < 0:
        k += n
    return k


def advect_x(double[:, ::1] phi, double[::1] delta):
    """Periodic conservative remap of each w-row by delta[i] cells."""
    cdef Py_ssize_t nw = phi.shape[0]
    cdef Py_ssize_t nx = phi.shape[1]
    out_arr = np.empty((nw, nx), dtype=np.float64)
    scratch = np.empty((3, nx), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double[:, ::1] sc = scratch
    cdef Py_ssize_t i, j, q, j0, jm1, jm2, jp1
    cdef double theta, eL, eR, aL, d, a6, aRv

    for i in range(nw):
        q = <Py_ssize_t>floor(delta[i])
        theta = delta[i] - q
        with nogil:
            for j in range(nx):
                jm1 = _wrap(j - 1, nx)
                jm2 = _wrap(j - 2, nx)
                jp1 = _wrap(j + 1, nx)
                # left edge of cell j (4th order)
                sc[0, j] = (7.0 * (phi[i, jm1] + phi[i, j])
                            - (phi[i, jm2] + phi[i, jp1])) / 12.0
            for j in range(nx):
                jp1 = _wrap(j + 1, nx)
                _ppm_cell(sc[0, j], phi[i, j], sc[0, jp1], &aL, &d, &a6)
                aRv = aL + d
                sc[1, j] = _right_integral(aRv, d, a6, theta)
            for j in range(nx):
                j0 = _wrap(j - q, nx)
                jm1 = _wrap(j0 - 1, nx)
                out[i, j] = sc[1, jm1] + phi[i, j0] - sc[1, j0]
    return out_arr


cdef inline double _phi_at(double[:, ::1] phi, Py_ssize_t i, Py_ssize_t j,
                           Py_ssize_t nw) nogil:
    if i < 0 or i >= nw:
        return 0.0
    return phi[i, j]


def kick_w(double[:, ::1] phi, double[::1] kappa):
    """Conservative remap of each x-column by -kappa[j] cells, zero boundary."""
    cdef Py_ssize_t nw = phi.shape[0]
    cdef Py_ssize_t nx = phi.shape[1]
    out_arr = np.empty((nw, nx), dtype=np.float64)
    scratch = np.empty((2, nw), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double[:, ::1] sc = scratch
    cdef Py_ssize_t i, j, q, i0, im1
    cdef double theta, delta, aL, d, a6, aRv, eL, eR, r_m1, r_0, p_0

    for j in range(nx):
        delta = -kappa[j]
        q = <Py_ssize_t>floor(delta)
        theta = delta - q
        with nogil:
            for i in range(nw):
                # left edge of cell i with zero padding outside the window
                sc[0, i] = (7.0 * (_phi_at(phi, i - 1, j, nw) + phi[i, j])
                            - (_phi_at(phi, i - 2, j, nw)
                               + _phi_at(phi, i + 1, j, nw))) / 12.0
            for i in range(nw):
                eL = sc[0, i]
                eR = sc[0, i + 1] if i + 1 < nw else 0.0
                _ppm_cell(eL, phi[i, j], eR, &aL, &d, &a6)
                aRv = aL + d
                sc[1, i] = _right_integral(aRv, d, a6, theta)
            for i in range(nw):
                i0 = i - q
                im1 = i0 - 1
                r_m1 = sc[1, im1] if 0 <= im1 < nw else 0.0
                r_0 = sc[1, i0] if 0 <= i0 < nw else 0.0
                p_0 = phi[i0, j] if 0 <= i0 < nw else 0.0
                out[i, j] = r_m1 + p_0 - r_0
    return out_arr
