"""Faber polynomials of a normalized map g(w) = w + sum b_n / w^n.

Two independent constructions are provided: the coefficient recurrence

    Phi_{n+1} = w Phi_n - sum_{k=1}^{n-1} b_{n-k} Phi_k - (n+1) b_n,

seeded with Phi_0 = 1, Phi_1 = w, and extraction from the generating
logarithm  log((g(w) - xi)/w) = - sum_n Phi_n(xi) / (n w^n).  The second is a
formal coefficient identity; the float kernel guards against rounding
amplification when |xi| and the b_n are large and cancellation sets in.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import NumericDomainError, OrderError
from .series import AsymptoticSeries, Laurent

__all__ = [
    "FaberPolynomial",
    "faber_all",
    "faber_via_log",
    "faber_derivative",
    "faber_eval",
]

_EPS = float(np.finfo(float).eps)


@dataclass
class FaberPolynomial:
    """Polynomial Phi_n, coefficients ascending in w; monic for n >= 1."""

    index: int
    coeffs: list

    def __post_init__(self):
        if len(self.coeffs) != self.index + 1:
            raise OrderError("Faber polynomial needs index+1 coefficients")

    def __call__(self, w):
        acc = 0 * w if not np.isscalar(w) else 0
        for c in reversed(self.coeffs):
            acc = acc * w + c
        return acc

    def derivative_coeffs(self):
        return [k * c for k, c in enumerate(self.coeffs)][1:] or [0]

    def to_json(self):
        return json.dumps({"n": self.index, "coeffs": [float(c) for c in self.coeffs]})


def faber_all(b, n_max: int):
    """Phi_0..Phi_n_max from the recurrence; ``b[i]`` is b_{i+1}.

    Coefficients may be floats or Fractions (exact kernel).
    """
    b = list(b)
    if n_max > len(b):
        raise OrderError(f"need b_1..b_{n_max}, got only {len(b)} coefficients")
    polys = [FaberPolynomial(0, [1]), FaberPolynomial(1, [0, 1])]
    for n in range(1, n_max):
        nxt = [0] * (n + 2)
        for k, c in enumerate(polys[n].coeffs):
            nxt[k + 1] = nxt[k + 1] + c
        for k in range(1, n):
            bnk = b[n - k - 1]
            for j, c in enumerate(polys[k].coeffs):
                nxt[j] = nxt[j] - bnk * c
        nxt[0] = nxt[0] - (n + 1) * b[n - 1]
        polys.append(FaberPolynomial(n + 1, nxt))
    return polys[: n_max + 1]


def _exactish(lau):
    return all(isinstance(c, (int, Fraction)) for c in lau.coeffs)


def _log_tail(u, n_max, lo):
    """Tail coefficients of log(1 + u) for a pure-tail Laurent u."""
    acc = Laurent(0, [])
    exact = _exactish(u)
    upow = u
    for k in range(1, n_max + 1):
        sign = 1 if k % 2 == 1 else -1
        acc = acc + upow.scale(Fraction(sign, k) if exact else sign / k)
        if k < n_max:
            upow = (upow * u).truncate(lo)
    return acc


def _abs_log_tail(u_abs, n_max, lo):
    """Same recursion as _log_tail with all signs positive: rounding bound."""
    acc = Laurent(0, [])
    upow = u_abs
    for k in range(1, n_max + 1):
        acc = acc + upow.scale(1.0 / k)
        if k < n_max:
            upow = (upow * u_abs).truncate(lo)
    return acc


def faber_via_log(g: AsymptoticSeries, xi, n_max: int, guard_tol: float = 1e-12):
    """Phi_1(xi)..Phi_n_max(xi) from the generating logarithm.

    Extraction is formally exact; with float coefficients the result can lose
    accuracy through cancellation, so the same recursion is run on absolute
    values and the call is rejected when the estimated relative rounding
    error exceeds ``guard_tol``.
    """
    g.require_normalized("map series")
    if n_max > g.order + 1:
        raise OrderError(f"map series holds b_1..b_{g.order + 1}, need b_1..b_{n_max}")
    lo = -n_max
    # u = (g(w) - xi)/w - 1, a pure tail starting at w^-1
    u = ((g.to_laurent() - Laurent(0, [xi])).shift(-1) - Laurent(0, [1])).truncate(lo)
    log_tail = _log_tail(u, n_max, lo)
    values = np.array(
        [-n * float(log_tail.coeff(-n)) for n in range(1, n_max + 1)], dtype=float
    )
    if not _exactish(u):
        u_abs = Laurent(u.hi, [abs(c) for c in u.coeffs], u.floor)
        mag = _abs_log_tail(u_abs, n_max, lo)
        for n in range(1, n_max + 1):
            scale = n * float(mag.coeff(-n))
            ref = max(abs(values[n - 1]), 1.0)
            err = _EPS * scale / ref
            if err > guard_tol:
                raise NumericDomainError(
                    f"log-series extraction ill-conditioned at order {n}: "
                    f"estimated rounding error {err:.2e} > {guard_tol:.0e}"
                )
    return values


def faber_derivative(phi: FaberPolynomial, xi):
    """Phi'_n evaluated at xi."""
    acc = 0
    for c in reversed(phi.derivative_coeffs()):
        acc = acc * xi + c
    return acc


def faber_eval(phi: FaberPolynomial, xi):
    """Phi_n evaluated at xi."""
    return phi(xi)
