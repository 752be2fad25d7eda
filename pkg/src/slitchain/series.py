"""Truncated asymptotic-series algebra at infinity.

The central object is a normalized expansion

    lambda(z) = z + c_const + sum_{n=0}^{N} c[n] * z^{-(n+1)},

together with a windowed Laurent representation used for products, reciprocals
and composition.  Coefficients are generic: Python floats, complex numbers,
``fractions.Fraction`` (exact kernel), numpy arrays (one series per grid
point), or any object supporting ``+``, ``-`` and ``*`` (e.g. exact
trigonometric polynomials, sympy symbols).  Every operation truncates to the
smaller input order; nothing is silently extended with zeros beyond the
declared order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .errors import OrderError

__all__ = [
    "Laurent",
    "AsymptoticSeries",
    "LaxPolynomial",
    "mul",
    "compose",
    "invert",
    "h_coefficients",
    "lax",
    "series_to_json",
    "series_from_json",
]


def _is_exact_zero(c):
    """True only for scalar numbers equal to zero (arrays are never trimmed)."""
    return isinstance(c, (int, float, complex, Fraction)) and c == 0


def scale_by_inverse_int(c, n):
    """c / n keeping Fractions exact and everything else in float arithmetic."""
    if isinstance(c, (int, Fraction)):
        return Fraction(c) / n
    if isinstance(c, (float, complex)):
        return c / n
    # arrays, trig polynomials, symbols: let the object decide
    try:
        return c * Fraction(1, n)
    except TypeError:
        return c * (1.0 / n)


def _scalar_inv(c):
    """1 / c for a scalar leading coefficient."""
    if isinstance(c, (int, Fraction)):
        if c == 1 or c == -1:
            return int(c)  # keeps generic coefficients (arrays, symbols) untouched
        return Fraction(1) / c
    return 1.0 / c


class Laurent:
    """Windowed Laurent expansion at infinity: sum of a_k z^k, k <= hi.

    ``coeffs[i]`` is the coefficient of ``z**(hi - i)``.  ``floor`` is the
    lowest power whose coefficient is guaranteed correct; ``floor=None`` means
    the expansion is exact all the way down (everything below the stored
    window is exactly zero, as for polynomials).  Products propagate floors so
    that a coefficient is never read from the unknown part of a truncated
    tail; reading below the floor raises :class:`OrderError`.
    """

    __slots__ = ("hi", "coeffs", "floor")

    def __init__(self, hi, coeffs, floor=None):
        coeffs = list(coeffs)
        if floor is not None:
            lo = hi - len(coeffs) + 1
            if lo < floor:
                coeffs = coeffs[: hi - floor + 1]
            elif lo > floor:
                # the provided window does not reach the claimed floor:
                # shrink the guarantee rather than invent zero coefficients
                floor = lo
        else:
            while coeffs and _is_exact_zero(coeffs[-1]):
                coeffs.pop()
        while coeffs and _is_exact_zero(coeffs[0]):
            coeffs.pop(0)
            hi -= 1
        self.hi = hi
        self.coeffs = coeffs
        self.floor = floor

    # -- accessors ---------------------------------------------------------

    @property
    def lo(self):
        return self.hi - len(self.coeffs) + 1

    def coeff(self, k):
        if k > self.hi:
            return 0
        if k >= self.lo:
            return self.coeffs[self.hi - k]
        if self.floor is None:
            return 0
        raise OrderError(f"coefficient of z^{k} below truncation floor {self.floor}")

    def poly_coeffs(self):
        """Coefficients of the polynomial part, ascending from z^0."""
        if self.floor is not None and self.floor > 0:
            raise OrderError("polynomial part not fully determined")
        return [self.coeff(k) for k in range(0, max(self.hi, 0) + 1)]

    def tail_coeffs(self, order):
        """Coefficients c[0..order] of z^{-1}..z^{-(order+1)}."""
        return [self.coeff(-(n + 1)) for n in range(order + 1)]

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, Laurent):
            other = Laurent(0, [other])
        hi = max(self.hi, other.hi)
        floors = [f for f in (self.floor, other.floor) if f is not None]
        floor = max(floors) if floors else None
        lo = floor if floor is not None else min(self.lo, other.lo)
        coeffs = [self.coeff(k) + other.coeff(k) for k in range(hi, lo - 1, -1)]
        return Laurent(hi, coeffs, floor)

    def __neg__(self):
        return Laurent(self.hi, [-c for c in self.coeffs], self.floor)

    def __sub__(self, other):
        if not isinstance(other, Laurent):
            other = Laurent(0, [other])
        return self + (-other)

    def scale(self, a):
        return Laurent(self.hi, [a * c for c in self.coeffs], self.floor)

    def __mul__(self, other):
        if not isinstance(other, Laurent):
            return self.scale(other)
        if self.floor is None and other.floor is None:
            floor = None
        elif self.floor is None:
            floor = other.floor + self.hi
        elif other.floor is None:
            floor = self.floor + other.hi
        else:
            floor = max(self.floor + other.hi, other.floor + self.hi)
        hi = self.hi + other.hi
        lo = floor if floor is not None else self.lo + other.lo
        width = hi - lo + 1
        if width <= 0:
            return Laurent(hi, [], floor)
        acc = [0] * width
        for i, a in enumerate(self.coeffs):
            if _is_exact_zero(a):
                continue
            pa = self.hi - i
            for j, b in enumerate(other.coeffs):
                p = pa + (other.hi - j)
                if p < lo:
                    break
                acc[hi - p] = acc[hi - p] + a * b
        return Laurent(hi, acc, floor)

    def truncate(self, lo):
        """Drop powers below ``lo``; the result's floor is at least ``lo``."""
        if self.floor is not None and self.floor >= lo:
            return self
        kept = self.coeffs[: self.hi - lo + 1]
        dropped = self.coeffs[self.hi - lo + 1 :]
        if self.floor is None and not any(not _is_exact_zero(c) for c in dropped):
            return self
        return Laurent(self.hi, kept, lo)

    def shift(self, k):
        """Multiply by z^k."""
        floor = None if self.floor is None else self.floor + k
        return Laurent(self.hi + k, list(self.coeffs), floor)

    def diff_z(self):
        coeffs = []
        for i, c in enumerate(self.coeffs):
            p = self.hi - i
            coeffs.append(p * c if p != 0 else 0 * c)
        floor = None if self.floor is None else self.floor - 1
        return Laurent(self.hi - 1, coeffs, floor)

    def map_coeffs(self, fn):
        """Apply ``fn`` to every stored coefficient (e.g. an x-derivative)."""
        return Laurent(self.hi, [fn(c) for c in self.coeffs], self.floor)

    def reciprocal(self, lo):
        """1/self down to power ``lo``; the leading coefficient must be a
        nonzero scalar (it is +-1 in every use in this library)."""
        if not self.coeffs:
            raise ZeroDivisionError("reciprocal of zero series")
        lead = self.coeffs[0]
        inv_lead = _scalar_inv(lead)
        p = self.hi
        # u = self * z^-p / lead - 1 is a pure tail
        u = self.shift(-p).scale(inv_lead) - Laurent(0, [1])
        u = u.truncate(lo + p)
        acc = Laurent(0, [1])
        upow = u
        sign = -1
        # u has top power <= -1, so u^j cannot reach power lo+p for j large
        for _ in range(-(lo + p)):
            if not upow.coeffs:
                break
            acc = acc + (upow if sign > 0 else -upow)
            upow = (upow * u).truncate(lo + p)
            sign = -sign
        return acc.shift(-p).scale(inv_lead).truncate(lo)

    def power(self, n, lo):
        """self**n with all coefficients down to power ``lo`` correct (n >= 1).

        Intermediate factors keep a margin of ``hi`` per remaining factor so
        that truncation never pollutes the requested window.
        """
        out = self
        for k in range(2, n + 1):
            out = (out * self).truncate(lo - (n - k) * max(self.hi, 0))
        return out.truncate(lo)

    def __repr__(self):
        terms = ", ".join(f"z^{self.hi - i}: {c!r}" for i, c in enumerate(self.coeffs))
        return f"Laurent({terms}; floor={self.floor})"


@dataclass
class AsymptoticSeries:
    """Normalized expansion z + const_term + sum c[n] z^{-(n+1)}, n = 0..order.

    The leading coefficient is fixed to 1.  ``const_term`` must be zero for
    the map-type series (lambda-, z- and g-type); it is carried only so that
    intermediate products can be represented.
    """

    order: int
    coeffs: list
    const_term: object = 0

    def __post_init__(self):
        self.coeffs = list(self.coeffs)
        if self.order < 0:
            raise OrderError("series order must be >= 0")
        if len(self.coeffs) != self.order + 1:
            raise OrderError(
                f"expected {self.order + 1} tail coefficients, got {len(self.coeffs)}"
            )

    @classmethod
    def identity(cls, order):
        return cls(order, [0] * (order + 1))

    def require_normalized(self, what="series"):
        if not _is_exact_zero(self.const_term):
            raise OrderError(f"{what} must have zero constant term")

    def to_laurent(self):
        # a series object is a self-contained finite expression; truncation
        # back to a declared order happens explicitly at operation boundaries
        return Laurent(1, [1, self.const_term] + self.coeffs, floor=None)

    @classmethod
    def from_laurent(cls, lau, order):
        if lau.floor is not None and lau.floor > -(order + 1):
            raise OrderError("Laurent window too short for requested order")
        return cls(order, lau.tail_coeffs(order), lau.coeff(0))

    def truncated(self, order):
        if order > self.order:
            raise OrderError("cannot extend a series beyond its declared order")
        return AsymptoticSeries(order, self.coeffs[: order + 1], self.const_term)


@dataclass
class LaxPolynomial:
    """(1/n) (lambda^n)_{>=0}: polynomial coefficients ascending in z."""

    degree: int
    coeffs: list

    def __post_init__(self):
        if len(self.coeffs) != self.degree + 1:
            raise OrderError("coefficient count must equal degree + 1")

    def to_laurent(self):
        return Laurent(self.degree, list(reversed(self.coeffs)), floor=None)

    def __call__(self, z):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc


def mul(a: AsymptoticSeries, b: AsymptoticSeries, order: int) -> Laurent:
    """Product of two normalized-lead series, truncated at z^{-(order+1)}.

    Returns the full windowed Laurent object; use ``poly_coeffs()`` for the
    polynomial part (degrees >= 0) and ``tail_coeffs(order)`` for the tail.
    """
    if order > min(a.order, b.order):
        raise OrderError("product order exceeds an input's truncation order")
    return (a.to_laurent() * b.to_laurent()).truncate(-(order + 1))


def compose(outer: AsymptoticSeries, inner: AsymptoticSeries, order: int) -> AsymptoticSeries:
    """outer(inner(.)) truncated at the given order (both normalized)."""
    outer.require_normalized("outer series")
    inner.require_normalized("inner series")
    if order > min(outer.order, inner.order):
        raise OrderError("composition order exceeds an input's truncation order")
    lo = -(order + 1)
    g = inner.to_laurent().truncate(lo)
    recip = g.reciprocal(lo)
    out = g
    rpow = recip
    for n in range(order + 1):
        # rpow = g^{-(n+1)}
        out = out + rpow.scale(outer.coeffs[n])
        if n < order:
            rpow = (rpow * recip).truncate(lo)
    return AsymptoticSeries.from_laurent(out.truncate(lo), order)


def invert(lambda_series: AsymptoticSeries) -> AsymptoticSeries:
    """Functional inverse of a normalized series, same truncation order.

    For lambda(z) = z + sum A^n z^{-(n+1)} the result is the expansion of
    z(lambda); its stored coefficients are the actual expansion coefficients,
    i.e. ``-H^n`` in the convention z = lambda - sum H^n lambda^{-(n+1)}.
    Iterative substitution: z_{k+1} = lambda - sum_n A^n z_k^{-(n+1)}, which
    gains one correct order per sweep and is exact in rational arithmetic.
    """
    lambda_series.require_normalized("lambda series")
    order = lambda_series.order
    lo = -(order + 1)
    lam = Laurent(1, [1, 0])  # the identity, in the lambda variable
    z = lam
    a = lambda_series.coeffs
    for _ in range(order + 2):
        recip = z.reciprocal(lo)
        acc = lam
        rpow = recip
        for n in range(order + 1):
            acc = acc - rpow.scale(a[n])
            if n < order:
                rpow = (rpow * recip).truncate(lo)
        z = acc.truncate(lo)
    return AsymptoticSeries.from_laurent(z, order)


def h_coefficients(lambda_series: AsymptoticSeries) -> list:
    """H^0..H^N of the inverse map z(lambda) = lambda - sum H^n lambda^{-(n+1)}."""
    return [-c for c in invert(lambda_series).coeffs]


def lax(lambda_series: AsymptoticSeries, n: int) -> LaxPolynomial:
    """(1/n) (lambda^n)_{>=0} for 1 <= n <= order."""
    if not 1 <= n <= lambda_series.order:
        raise OrderError(f"lax index {n} outside 1..{lambda_series.order}")
    lam = lambda_series.to_laurent()
    poly = lam.power(n, 0).poly_coeffs()
    return LaxPolynomial(n, [scale_by_inverse_int(c, n) for c in poly])


# -- serialization ----------------------------------------------------------


def _coeff_to_json(c):
    if isinstance(c, Fraction):
        return f"{c.numerator}/{c.denominator}"
    if isinstance(c, complex):
        return [c.real, c.imag]
    return c


def _coeff_from_json(v):
    if isinstance(v, str):
        num, _, den = v.partition("/")
        return Fraction(int(num), int(den) if den else 1)
    if isinstance(v, list):
        return complex(v[0], v[1])
    return v


def series_to_json(series: AsymptoticSeries) -> str:
    return json.dumps(
        {"order": series.order, "coeffs": [_coeff_to_json(c) for c in series.coeffs]}
    )


def series_from_json(text: str) -> AsymptoticSeries:
    data = json.loads(text)
    coeffs = [_coeff_from_json(v) for v in data["coeffs"]]
    return AsymptoticSeries(data["order"], coeffs)
