import numpy as np
import pytest

from oracles import convergence_order
from slitchain.errors import (
    DegeneracyError,
    OrderError,
    PreconditionError,
    ShockError,
    SingularityError,
)
from slitchain.reduction import (
    N1Fields,
    ReductionFixture,
    ReductionState,
    ansatz_residual,
    cold_plasma_fixture,
    commuting_reduction_velocity,
    conservation_pair_residual,
    dist_residual,
    dkp_system_residual,
    gt_residual,
    hm1_flow_residual,
    integrate_hm1,
    loewner_system_integrate,
    modified_loewner_check,
    n1_solve,
    tsarev_check,
    vertex_flows,
)

R_AXES = [np.linspace(1.0, 2.0, 33), np.linspace(-0.5, 0.0, 33)]


def identity_fixture():
    return ReductionFixture(
        1,
        mu=lambda r: np.stack([np.asarray(r[..., 0], float)], axis=-1),
        u=lambda r: float(np.asarray(r).reshape(-1)[0]),
        grad_u=lambda r: np.ones(1),
    )


class TestGT:
    def test_cold_plasma_analytic_zero(self):
        st = ReductionState.from_fixture(cold_plasma_fixture(), R_AXES)
        rep_mu, rep_u = gt_residual(st.mu, st.u, st.spacings())
        # the fixture is quadratic, so centered differences are exact
        assert rep_mu.max < 1e-11
        assert rep_u.max < 1e-11

    def test_hand_derivative_identity(self):
        # d(mu_-)/d(r_+) = 1/4 = d(u)/d(r_+) / (mu_+ - mu_-)
        fx = cold_plasma_fixture()
        r = np.array([1.3, -0.2])
        h = 1e-6
        dmu = (fx.mu(np.array([1.3 + h, -0.2]))[1] - fx.mu(np.array([1.3 - h, -0.2]))[1]) / (2 * h)
        assert dmu == pytest.approx(0.25, abs=1e-9)
        du = fx.grad_u(r)[0]
        mu = fx.mu(r)
        assert du / (mu[0] - mu[1]) == pytest.approx(0.25, abs=1e-12)

    def test_constant_u_and_mu_passes(self):
        grid = np.linspace(0, 1, 17)
        mu = np.stack([np.full((17, 17), 0.0), np.full((17, 17), 1.0)])
        u = np.full((17, 17), 0.7)
        rep_mu, rep_u = gt_residual(mu, u, [grid[1] - grid[0]] * 2)
        assert rep_mu.max < 1e-12
        assert rep_u.max < 1e-12

    def test_linear_perturbation_scales(self):
        st = ReductionState.from_fixture(cold_plasma_fixture(), R_AXES)
        mesh = np.meshgrid(*R_AXES, indexing="ij")
        outs = []
        for eps in (1e-3, 5e-4):
            mu = st.mu.copy()
            mu[1] = mu[1] + eps * mesh[0]
            rep, _ = gt_residual(mu, st.u, st.spacings())
            outs.append(rep.max)
        assert 0.3e-3 < outs[0] < 3e-3
        assert outs[0] / outs[1] == pytest.approx(2.0, rel=0.05)

    def test_velocity_collision_detected(self):
        grid = np.linspace(0, 1, 9)
        mu = np.stack([np.full((9, 9), 0.5), np.full((9, 9), 0.5 + 1e-5)])
        u = np.zeros((9, 9))
        with pytest.raises(DegeneracyError):
            gt_residual(mu, u, [grid[1] - grid[0]] * 2)

    def test_needs_two_components(self):
        with pytest.raises(PreconditionError):
            gt_residual(np.zeros((1, 5)), np.zeros(5), [0.1])


class TestTsarev:
    def test_dispersive_relation_passes(self):
        st = ReductionState.from_fixture(cold_plasma_fixture(), R_AXES)
        assert tsarev_check(st).max < 1e-11

    def test_lambda_equal_mu_trivially_zero(self):
        st = ReductionState.from_fixture(cold_plasma_fixture(), R_AXES)
        same = ReductionState(st.r_axes, st.mu, st.u, st.mu.copy(), st.v)
        assert tsarev_check(same).max < 1e-12

    def test_cubic_ansatz_detected(self):
        st = ReductionState.from_fixture(cold_plasma_fixture(), R_AXES)
        bad = ReductionState(st.r_axes, st.mu, st.u, st.mu**3, st.v)
        assert tsarev_check(bad).max > 0.1

    def test_mixed_partials_of_v_consistent(self):
        st = ReductionState.from_fixture(cold_plasma_fixture(), R_AXES)
        sp = st.spacings()
        vxy = np.gradient(np.gradient(st.v, sp[0], axis=0, edge_order=2),
                          sp[1], axis=1, edge_order=2)
        vyx = np.gradient(np.gradient(st.v, sp[1], axis=1, edge_order=2),
                          sp[0], axis=0, edge_order=2)
        assert np.max(np.abs(vxy - vyx)) < 1e-8


class TestAnsatz:
    def test_dispersive_relation_closes(self):
        assert abs(ansatz_residual(lambda m, u: m**2 + u, 0.2, 0.9, 0.3)) < 1e-8

    def test_constant_closes(self):
        assert abs(ansatz_residual(lambda m, u: 4.25, -0.3, 0.6, 0.1)) < 1e-12

    def test_cubic_fails_generically(self):
        res = ansatz_residual(lambda m, u: m**3, 0.0, 1.0, 0.5)
        assert res == pytest.approx(-1.0, abs=1e-6)

    def test_collision_rejected(self):
        with pytest.raises(PreconditionError):
            ansatz_residual(lambda m, u: m, 0.5, 0.5, 0.1)


class TestN1Solve:
    def test_hand_fixture(self):
        ident = lambda r: np.asarray(r, float)
        out = n1_solve(ident, ident, ident, [(2.0, 1.0, 0.0)], r_bracket=(-3, 3))
        assert out.r[0] == pytest.approx(1.0, abs=1e-12)
        assert out.u[0] == pytest.approx(1.0, abs=1e-12)
        assert out.v[0] == pytest.approx(0.5, abs=1e-10)

    def test_initial_slice_recovers_profile(self):
        ident = lambda r: np.asarray(r, float)
        pts = [(xv, 0.0, 0.0) for xv in np.linspace(-1, 1, 11)]
        out = n1_solve(ident, ident, ident, pts, r_bracket=(-3, 3))
        assert np.allclose(out.r, np.linspace(-1, 1, 11), atol=1e-12)

    def test_first_conservation_law_of_the_pair(self):
        # v_x + u_s = r/(1+s) - r/(1+s) = 0 at pre-shock points
        ident = lambda r: np.asarray(r, float)
        h = 1e-5
        for (xv, sv) in ((1.7, 0.8), (2.3, 1.1)):
            pts = [(xv + h, sv, 0.0), (xv - h, sv, 0.0), (xv, sv + h, 0.0),
                   (xv, sv - h, 0.0)]
            out = n1_solve(ident, ident, ident, pts, r_bracket=(-4, 4))
            v_x = (out.v[0] - out.v[1]) / (2 * h)
            u_s = (out.u[2] - out.u[3]) / (2 * h)
            assert abs(v_x + u_s) < 1e-8

    def test_shock_detection(self):
        ident = lambda r: np.asarray(r, float)
        # compressive data: X0 decreasing slope region -> dX/dr <= 0 at s
        x0 = lambda r: np.asarray(r, float) - 1.2 * np.tanh(2.0 * np.asarray(r, float))
        with pytest.raises((ShockError, PreconditionError)):
            n1_solve(ident, lambda r: 0.0 * np.asarray(r, float), x0,
                     [(0.0, 0.0, 0.0)], r_bracket=(-2, 2))


class TestLoewnerSystem:
    def test_constant_u_keeps_z(self):
        fx = ReductionFixture(
            2,
            mu=cold_plasma_fixture().mu,
            u=lambda r: 1.0,
            grad_u=lambda r: np.zeros(2),
        )
        z = loewner_system_integrate(fx, 4.0 + 1.0j,
                                     [np.array([1.0, -0.5]), np.array([2.0, 0.0])])
        assert z == 4.0 + 1.0j

    def test_n1_against_tiny_step_reference(self):
        fx = identity_fixture()
        z = loewner_system_integrate(fx, 10.0 + 0j, [np.array([0.0]), np.array([1.0])])
        zr, rr = 10.0, 0.0
        n = 200000
        h = 1.0 / n
        for _ in range(n):
            k1 = 1.0 / (rr - zr)
            k2 = 1.0 / (rr + h / 2 - (zr + h / 2 * k1))
            k3 = 1.0 / (rr + h / 2 - (zr + h / 2 * k2))
            k4 = 1.0 / (rr + h - (zr + h * k3))
            zr += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            rr += h
        assert abs(z - zr) < 1e-8

    def test_path_independence_on_cold_plasma(self):
        fx = cold_plasma_fixture()
        stair1 = [np.array([1.0, -0.5]), np.array([2.0, -0.5]), np.array([2.0, 0.0])]
        stair2 = [np.array([1.0, -0.5]), np.array([1.0, 0.0]), np.array([2.0, 0.0])]
        z1 = loewner_system_integrate(fx, 5.0 + 2.0j, stair1)
        z2 = loewner_system_integrate(fx, 5.0 + 2.0j, stair2)
        assert abs(z1 - z2) < 1e-6

    def test_collision_raises(self):
        fx = identity_fixture()
        with pytest.raises(SingularityError):
            loewner_system_integrate(fx, 0.5 + 0.0j,
                                     [np.array([0.0]), np.array([1.0])])


def n1_grids(n):
    nx, ns, ny = 2 * n + 1, n + 1, n // 2 + 1
    xs = np.linspace(1.0, 3.0, nx)
    ss = np.linspace(0.5, 1.5, ns)
    ys = np.linspace(-0.05, 0.05, ny)
    return xs, ss, ys


def n1_fields_on_grid(n, z0=4.0j):
    ident = lambda r: np.asarray(r, float)
    xs, ss, ys = n1_grids(n)
    X, S, Y = np.meshgrid(xs, ss, ys, indexing="ij")
    pts = np.stack([X, S, Y], axis=-1).reshape(-1, 3)
    out = n1_solve(ident, ident, ident, pts, r_bracket=(-0.5, 4.0))
    shape = X.shape
    r = out.r.reshape(shape)
    fx = identity_fixture()
    r_tab = np.linspace(float(r.min()) - 1e-9, float(r.max()) + 1e-9, 1025)
    z_tab = np.empty(r_tab.size, complex)
    z_tab[0] = loewner_system_integrate(fx, z0, [np.array([0.0]), np.array([r_tab[0]])])
    for j in range(1, r_tab.size):
        z_tab[j] = loewner_system_integrate(
            fx, z_tab[j - 1], [np.array([r_tab[j - 1]]), np.array([r_tab[j]])]
        )
    z = np.interp(r, r_tab, z_tab.real) + 1j * np.interp(r, r_tab, z_tab.imag)
    spacings = (xs[1] - xs[0], ss[1] - ss[0], ys[1] - ys[0])
    return r, out.u.reshape(shape), out.v.reshape(shape), z, spacings


class TestConservationPairs:
    def test_constant_state_zero(self):
        ones = np.ones((5, 5, 5))
        g1, g2 = conservation_pair_residual(0.5 * ones, 0.2 * ones, 0.1 * ones,
                                            0.1, 0.1, 0.1)
        assert g1.max == 0.0
        assert g2.max == 0.0

    def test_n1_fields_converge_second_order(self):
        # the corner of the (x, s, y) box dominates the max norm with a
        # slowly saturating prefactor; convergence is measured in l2, with
        # the max norm required to decrease monotonically
        l2 = {"g1": [], "g2": [], "d1": [], "d2": []}
        mx = {"g1": [], "g2": [], "d1": [], "d2": []}
        hs = []
        for n in (8, 16, 32):
            r, u, v, z, sp = n1_fields_on_grid(n)
            g1, g2 = conservation_pair_residual(z, u, v, *sp)
            d1, d2 = dkp_system_residual(u, v, *sp)
            for key, rep in (("g1", g1), ("g2", g2), ("d1", d1), ("d2", d2)):
                l2[key].append(rep.l2)
                mx[key].append(rep.max)
            hs.append(1.0 / n)
        for key, vals in l2.items():
            assert convergence_order(vals, hs) > 1.8, (key, vals)
        for key, vals in mx.items():
            assert vals[0] > vals[1] > vals[2], (key, vals)


class TestVertexFlows:
    def test_translation_flow_identically_zero(self):
        r, u, v, z, sp = n1_fields_on_grid(8)
        rep = vertex_flows(z, u, v, *sp, n=0)
        assert rep.max < 1e-13

    def test_flow_one_matches_first_conservation_law(self):
        r, u, v, z, sp = n1_fields_on_grid(8)
        rep1 = vertex_flows(z, u, v, *sp, n=1)
        g1, _ = conservation_pair_residual(z, u, v, *sp)
        assert np.allclose(np.abs(rep1.data), np.abs(g1.data), atol=1e-12)

    def test_out_of_scope_flow(self):
        r, u, v, z, sp = n1_fields_on_grid(4)
        with pytest.raises(OrderError):
            vertex_flows(z, u, v, *sp, n=3)

    def test_hm1_flow_residual_converges(self):
        ident = lambda r: np.asarray(r, float)
        outs, hs = [], []
        for n in (8, 16):
            r, u, v, z, sp = n1_fields_on_grid(n)
            r_tab = np.linspace(float(r.min()) - 1e-9, float(r.max()) + 1e-9, 2049)
            hm_tab = integrate_hm1(ident, ident, r_tab, -3.0)
            hm1 = np.interp(r, r_tab, hm_tab)
            rep = hm1_flow_residual(hm1, u, sp[0], sp[1])
            outs.append(rep.l2)
            hs.append(1.0 / n)
        assert convergence_order(outs, hs) > 1.8


class TestModifiedLoewner:
    def test_constant_u_trivial(self):
        fx = ReductionFixture(
            2, mu=cold_plasma_fixture().mu, u=lambda r: 1.0,
            grad_u=lambda r: np.zeros(2),
        )
        axes = [np.linspace(1.0, 2.0, 9), np.linspace(-0.5, 0.0, 9)]
        z = np.full((9, 9), 5.0 + 1.0j)
        hm1 = np.full((9, 9), -2.0)
        rep = modified_loewner_check(fx, axes, z, hm1)
        assert rep.max < 1e-13

    def test_n1_substitution_identity(self):
        ident = lambda r: np.asarray(r, float)
        fx1 = identity_fixture()
        r_grid = np.linspace(0.0, 1.0, 129)
        hm1 = integrate_hm1(ident, ident, r_grid, -3.0)
        z_tab = np.empty(r_grid.size, complex)
        z_tab[0] = 6.0 + 2.0j
        for j in range(1, r_grid.size):
            z_tab[j] = loewner_system_integrate(
                fx1, z_tab[j - 1], [np.array([r_grid[j - 1]]), np.array([r_grid[j]])]
            )
        fx = ReductionFixture(
            1,
            mu=lambda r: np.stack([np.asarray(r[..., 0], float)], axis=-1),
            u=lambda r: np.asarray(r[..., 0], float),
        )
        rep = modified_loewner_check(fx, [r_grid], z_tab, hm1)
        assert rep.max < 1e-6

    def test_dist_residual_on_reduction_data(self):
        ident = lambda r: np.asarray(r, float)
        outs, hs = [], []
        for n in (8, 16):
            r, u, v, z, sp = n1_fields_on_grid(n)
            r_tab = np.linspace(float(r.min()) - 1e-9, float(r.max()) + 1e-9, 2049)
            hm_tab = integrate_hm1(ident, ident, r_tab, -3.0)
            hm1 = np.interp(r, r_tab, hm_tab)
            rep = dist_residual(z - hm1, hm1, sp[0], sp[1])
            outs.append(rep.l2)
            hs.append(1.0 / n)
        assert convergence_order(outs, hs) > 1.8


class TestCommutingVelocities:
    def test_large_zeta_decay(self):
        mu = np.array([0.2, 0.9])
        w = commuting_reduction_velocity(mu, 100.0j)
        assert np.max(np.abs(w)) < 0.011

    def test_leading_expansion(self):
        mu = np.array([0.4])
        for zeta in (30.0j, 60.0j):
            w = commuting_reduction_velocity(mu, zeta)
            lead = -zeta * w[0]
            assert abs(lead - (1.0 + mu[0] / zeta)) < 2.0 / abs(zeta) ** 2

    def test_collision(self):
        with pytest.raises(SingularityError):
            commuting_reduction_velocity(np.array([0.5]), 0.5 + 0.0j)

    def test_smooth_on_n1_data(self):
        r, u, v, z, sp = n1_fields_on_grid(4, z0=3.0j)
        mu_vals = r  # mu(r) = r for the identity fixture
        w = 1.0 / (mu_vals - z)
        assert np.all(np.isfinite(w))
        assert np.max(np.abs(np.diff(w.real, axis=0))) < 0.2
