from fractions import Fraction as F

import numpy as np
import pytest

from oracles import divide_tail, series_to_dict
from slitchain.errors import NumericDomainError, OrderError
from slitchain.faber import (
    FaberPolynomial,
    faber_all,
    faber_derivative,
    faber_eval,
    faber_via_log,
)
from slitchain.series import AsymptoticSeries, invert


class TestRecurrence:
    def test_symbolic_phi2_phi3(self):
        b1, b2 = F(3, 7), F(-2, 5)
        polys = faber_all([b1, b2, 0], 3)
        assert polys[0].coeffs == [1]
        assert polys[1].coeffs == [0, 1]
        assert polys[2].coeffs == [-2 * b1, 0, 1]
        assert polys[3].coeffs == [-3 * b2, -3 * b1, 0, 1]

    def test_identity_map_gives_monomials(self):
        polys = faber_all([0] * 6, 6)
        for n, p in enumerate(polys):
            expect = [0] * n + [1]
            assert p.coeffs == expect

    def test_vertical_slit_instance(self):
        # g = sqrt(w^2 + 4t) at t = 1: b = (2, 0, -2)
        polys = faber_all([F(2), 0, F(-2)], 3)
        assert polys[2].coeffs == [-4, 0, 1]
        assert polys[3].coeffs == [0, -6, 0, 1]

    def test_order_error(self):
        with pytest.raises(OrderError):
            faber_all([1.0, 2.0], 3)

    def test_monic_and_degree(self):
        rng = np.random.default_rng(5)
        polys = faber_all(list(rng.uniform(-0.3, 0.3, 8)), 8)
        for n in range(1, 9):
            assert len(polys[n].coeffs) == n + 1
            assert polys[n].coeffs[-1] == 1

    def test_matches_polynomial_part_of_inverse_powers(self):
        # Phi_n equals [h^n]_{>=0} for h the functional inverse of g,
        # exactly in rational arithmetic for n <= 8.
        b = [F(1, 4), F(-1, 5), F(1, 7), 0, F(1, 9), 0, 0, F(-1, 8)]
        polys = faber_all(b, 8)
        # g as a normalized series: coeffs c[j] = b_{j+1}
        g = AsymptoticSeries(7, b)
        h = invert(g)
        lau = h.to_laurent()
        for n in range(1, 9):
            poly = lau.power(n, 0).poly_coeffs()
            assert poly == polys[n].coeffs


class TestViaLog:
    def test_identity_at_zero(self):
        g = AsymptoticSeries(8, [0.0] * 9)
        vals = faber_via_log(g, 0.0, 8)
        assert np.max(np.abs(vals)) == 0.0

    def test_identity_at_two_gives_powers(self):
        g = AsymptoticSeries(8, [0.0] * 9)
        vals = faber_via_log(g, 2.0, 8)
        assert np.allclose(vals, 2.0 ** np.arange(1, 9), rtol=0, atol=1e-12)

    def test_agrees_with_recurrence(self):
        rng = np.random.default_rng(11)
        b = rng.uniform(-0.1, 0.1, 8)
        g = AsymptoticSeries(7, list(b))
        vals = faber_via_log(g, 0.5, 8)
        polys = faber_all(list(b), 8)
        ref = np.array([faber_eval(polys[n], 0.5) for n in range(1, 9)])
        assert np.max(np.abs(vals - ref)) < 1e-10

    def test_guard_rejects_cancellation(self):
        # slit map sqrt(w^2 + 64): Phi_n(8) = 0 through massive intermediates,
        # so extraction at xi = 8 is genuinely ill-conditioned in floats
        b = [32.0, 0.0, -512.0, 0.0, 16384.0, 0.0, -655360.0, 0.0]
        g = AsymptoticSeries(7, b)
        with pytest.raises(NumericDomainError):
            faber_via_log(g, 8.0, 8)

    def test_order_error(self):
        g = AsymptoticSeries(3, [0.1, 0.0, 0.0, 0.0])
        with pytest.raises(OrderError):
            faber_via_log(g, 0.0, 6)


class TestDerivative:
    def test_phi2_derivative(self):
        phi2 = FaberPolynomial(2, [-2.0, 0.0, 1.0])
        assert faber_derivative(phi2, 1.5) == pytest.approx(3.0)

    def test_phi3_instance(self):
        # b1 = 1: Phi3 = w^3 - 3w - 3 b2; derivative at 2 is 3*4 - 3 = 9
        phi3 = FaberPolynomial(3, [0.0, -3.0, 0.0, 1.0])
        assert faber_derivative(phi3, 2.0) == pytest.approx(9.0)

    def test_resolvent_series_division_oracle(self):
        # 1/(g(w) - xi) = sum Phi'_n(xi) / (n w^n), checked against long division
        rng = np.random.default_rng(3)
        b = rng.uniform(-0.1, 0.1, 9)
        xi = 0.3
        polys = faber_all(list(b), 8)
        num = {0: 1.0}
        den = {1: 1.0, 0: -xi}
        for j, bj in enumerate(b):
            den[-(j + 1)] = bj
        coeffs = divide_tail(num, den, 8)
        for n in range(1, 9):
            assert coeffs[n - 1] * n == pytest.approx(
                faber_derivative(polys[n], xi), abs=1e-10
            )
