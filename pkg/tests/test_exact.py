from fractions import Fraction as F

import numpy as np

from slitchain.exact import TrigPoly


def test_product_to_sum():
    c1 = TrigPoly.cos(1)
    assert c1 * c1 == TrigPoly.const(F(1, 2)) + TrigPoly.cos(2, F(1, 2))
    s1 = TrigPoly.sin(1)
    assert s1 * s1 == TrigPoly.const(F(1, 2)) - TrigPoly.cos(2, F(1, 2))
    assert c1 * s1 == TrigPoly.sin(2, F(1, 2))


def test_derivative():
    p = TrigPoly.cos(3, F(2, 5)) + TrigPoly.sin(2, F(1, 7))
    assert p.diff() == TrigPoly.sin(3, F(-6, 5)) + TrigPoly.cos(2, F(2, 7))
    assert TrigPoly.const(5).diff().is_zero()


def test_scalar_ring_operations():
    p = TrigPoly.cos(1, F(1, 2))
    assert 0 * p == TrigPoly.const(0)
    assert (p - p).is_zero()
    assert 2 * p == TrigPoly.cos(1)
    assert (p + F(1, 3)).mean() == F(1, 3)


def test_evaluation_matches_numpy():
    p = TrigPoly.const(F(3, 2)) + TrigPoly.cos(2, F(1, 4)) + TrigPoly.sin(1, F(-1, 3))
    x = np.linspace(0, 2 * np.pi, 17)
    ref = 1.5 + 0.25 * np.cos(2 * x) - np.sin(x) / 3.0
    assert np.allclose(p(x), ref, atol=1e-15)


def test_product_matches_numeric_product():
    a = TrigPoly.cos(1, F(1, 3)) + TrigPoly.sin(2, F(2, 7))
    b = TrigPoly.const(F(1, 2)) + TrigPoly.cos(3, F(-1, 5))
    x = np.linspace(0, 2 * np.pi, 33)
    assert np.allclose((a * b)(x), a(x) * b(x), atol=1e-14)
