"""Independent oracles used to pin expected values.

Everything here is deliberately written against different representations
and algorithms than the library (dict-based power series, long division,
(eta, v) shallow-water form) so that agreement is evidence, not tautology.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np


# -- dict-based Laurent series at infinity ------------------------------------
# A series sum c_k z^k is a dict {k: c_k}; powers below `lo` are discarded.


def dmul(a, b, lo):
    out = {}
    for ka, ca in a.items():
        for kb, cb in b.items():
            k = ka + kb
            if k < lo:
                continue
            out[k] = out.get(k, 0) + ca * cb
    return {k: c for k, c in out.items() if c != 0}


def dreciprocal(a, lo):
    """1/a by explicit forward substitution on the coefficient equations."""
    hi = max(a.keys())
    lead = a[hi]
    out = {}
    for k in range(-hi, lo - 1, -1):
        # coefficient of z^(k+hi) in a*out must be delta_{k+hi,0}
        target = 1 if k + hi == 0 else 0
        acc = 0
        for ka, ca in a.items():
            kb = k + hi - ka
            if kb in out:
                acc += ca * out[kb]
        out[k] = (target - acc) / lead if not isinstance(lead, Fraction) else (
            Fraction(target - acc) / lead
        )
    return out


def dcompose(outer, inner, lo):
    """outer(inner) for outer = z + sum a_n z^-(n+1) given as tail dict."""
    out = dict(inner)
    rec = dreciprocal(inner, lo)
    power = dict(rec)
    n = 0
    while -(n + 1) >= lo:
        cn = outer.get(-(n + 1), 0)
        if cn != 0:
            for k, c in power.items():
                if k >= lo:
                    out[k] = out.get(k, 0) + cn * c
        power = dmul(power, rec, lo)
        n += 1
    return {k: c for k, c in out.items() if c != 0}


def series_to_dict(coeffs):
    d = {1: Fraction(1) if any(isinstance(c, Fraction) for c in coeffs) else 1.0}
    for n, c in enumerate(coeffs):
        if c != 0:
            d[-(n + 1)] = c
    return d


def dict_tail(d, order):
    return [d.get(-(n + 1), 0) for n in range(order + 1)]


def divide_tail(num, den, n_terms):
    """Long division of two tail dicts: coefficients of w^-1..w^-n_terms of
    num/den where den has leading power 1."""
    rec = dreciprocal(den, -n_terms - 2)
    quot = dmul(num, rec, -n_terms - 1)
    return [quot.get(-n, 0) for n in range(1, n_terms + 1)]


# -- shallow water reference ----------------------------------------------------


def shallow_water(eta0, v0, dx, s_end, dt):
    """(eta, v) form: eta_s + (eta v)_x = 0, v_s + (v^2/2 + eta)_x = 0.

    Spectral derivative + RK4; independent of the moment-chain code path.
    """
    eta0 = np.asarray(eta0, float)
    v0 = np.asarray(v0, float)
    n = eta0.size
    k = 2.0 * np.pi * np.fft.rfftfreq(n, d=dx)

    def ddx(a):
        return np.fft.irfft(np.fft.rfft(a) * (1j * k), n=n)

    def rhs(y):
        eta, v = y
        return np.array([-ddx(eta * v), -ddx(0.5 * v**2 + eta)])

    y = np.array([eta0, v0])
    nsteps = int(round(s_end / dt))
    h = s_end / nsteps
    for _ in range(nsteps):
        k1 = rhs(y)
        k2 = rhs(y + 0.5 * h * k1)
        k3 = rhs(y + 0.5 * h * k2)
        k4 = rhs(y + h * k3)
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return y[0], y[1]


# -- misc -----------------------------------------------------------------------


def convergence_order(errors, hs):
    """Least-squares slope of log(err) vs log(h)."""
    errors = np.asarray(errors, float)
    hs = np.asarray(hs, float)
    return float(np.polyfit(np.log(hs), np.log(errors), 1)[0])


def vertical_slit_f(z, t):
    """Closed form f(z, t) = sqrt(z^2 - 4t), branch asymptotic to z.

    Written as z sqrt(1 - 4t/z^2) so the branch follows z at infinity;
    boundary values on the slit are folded into the upper half-plane.
    """
    z = np.asarray(z, complex)
    val = z * np.lib.scimath.sqrt(1.0 - 4.0 * t / np.where(z == 0, 1.0, z) ** 2)
    val = np.where(z == 0, 2j * np.sqrt(t), val)
    return np.where(np.imag(val) < 0, -val, val)


def vertical_slit_g(w, t):
    """Closed form g(w, t) = sqrt(w^2 + 4t), branch asymptotic to w
    (valid off the slit)."""
    w = np.asarray(w, complex)
    val = w * np.lib.scimath.sqrt(1.0 + 4.0 * t / np.where(w == 0, 1.0, w) ** 2)
    return np.where(w == 0, 0.0, val)
