"""Exact trigonometric polynomials over the rationals.

Fields A^n(x) in the hierarchy identity checks are trigonometric polynomials
with Fraction coefficients: closed under +, * and d/dx, so chain/bracket
identities can be verified exactly, with no grid and no rounding.  Instances
are immutable values usable as generic series coefficients.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

__all__ = ["TrigPoly"]

_HALF = Fraction(1, 2)


def _frac(v):
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    raise TypeError(f"exact trig polynomial needs rational coefficients, got {type(v)!r}")


class TrigPoly:
    """sum_k a_k cos(kx) + b_k sin(kx) with exact rational a_k, b_k."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        # terms: {harmonic k >= 0: (cos coeff, sin coeff)}; sin coeff of k=0 unused
        clean = {}
        for k, (a, b) in (terms or {}).items():
            a, b = _frac(a), _frac(b)
            if k == 0:
                b = Fraction(0)
            if a or b:
                clean[k] = (a, b)
        self.terms = clean

    # -- constructors -------------------------------------------------------

    @classmethod
    def const(cls, value):
        return cls({0: (_frac(value), 0)})

    @classmethod
    def cos(cls, k, coeff=1):
        return cls({k: (_frac(coeff), 0)})

    @classmethod
    def sin(cls, k, coeff=1):
        return cls({k: (0, _frac(coeff))})

    # -- predicates ----------------------------------------------------------

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, TrigPoly):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == TrigPoly.const(other)
        return NotImplemented

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    # -- ring operations ------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = TrigPoly.const(other)
        if not isinstance(other, TrigPoly):
            return NotImplemented
        out = dict(self.terms)
        for k, (a, b) in other.terms.items():
            a0, b0 = out.get(k, (Fraction(0), Fraction(0)))
            out[k] = (a0 + a, b0 + b)
        return TrigPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return TrigPoly({k: (-a, -b) for k, (a, b) in self.terms.items()})

    def __sub__(self, other):
        return self + (-other if isinstance(other, TrigPoly) else TrigPoly.const(-_frac(other)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            f = _frac(other)
            return TrigPoly({k: (a * f, b * f) for k, (a, b) in self.terms.items()})
        if not isinstance(other, TrigPoly):
            return NotImplemented
        out = {}

        def bump(k, a, b):
            if k < 0:
                k, b = -k, -b
            a0, b0 = out.get(k, (Fraction(0), Fraction(0)))
            out[k] = (a0 + a, b0 + b)

        for k1, (a1, b1) in self.terms.items():
            for k2, (a2, b2) in other.terms.items():
                # product-to-sum at harmonics k1 +- k2
                bump(k1 + k2, _HALF * (a1 * a2 - b1 * b2), _HALF * (a1 * b2 + b1 * a2))
                bump(k1 - k2, _HALF * (a1 * a2 + b1 * b2), _HALF * (b1 * a2 - a1 * b2))
        return TrigPoly(out)

    __rmul__ = __mul__

    # -- calculus / evaluation -------------------------------------------------

    def diff(self):
        """d/dx, exact."""
        return TrigPoly({k: (k * b, -k * a) for k, (a, b) in self.terms.items() if k})

    def mean(self):
        """Average over one period (the k=0 cosine coefficient)."""
        return self.terms.get(0, (Fraction(0), Fraction(0)))[0]

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for k, (a, b) in self.terms.items():
            out = out + float(a) * np.cos(k * x) + float(b) * np.sin(k * x)
        return out

    def __repr__(self):
        if not self.terms:
            return "TrigPoly(0)"
        bits = []
        for k in sorted(self.terms):
            a, b = self.terms[k]
            if a:
                bits.append(f"{a}*cos({k}x)" if k else f"{a}")
            if b:
                bits.append(f"{b}*sin({k}x)")
        return "TrigPoly(" + " + ".join(bits) + ")"
