import numpy as np
import pytest

from oracles import vertical_slit_f, vertical_slit_g
from slitchain.errors import PreconditionError, ShockError
from slitchain.loewner import (
    Branch,
    DrivingSpec,
    Segment,
    VectorTimeSpec,
    characteristic_crossing_time,
    coefficient_flow_check,
    compose_per_slit_flows,
    evolve_series,
    map_f,
    solve_ode_point,
    successive_slits,
    time_splitting_solve,
    trace_hull,
    vector_time_reduce,
)

SLIT = DrivingSpec.single(t_end=1.2)


class TestPointODE:
    def test_vertical_slit_closed_form(self):
        tr = solve_ode_point(SLIT, 3j, 1.0)
        assert abs(tr.final - 1j * np.sqrt(5)) < 1e-8
        assert tr.swallow_time is None

    def test_boundary_point_swallowed_at_one(self):
        tr = solve_ode_point(SLIT, 2j, 1.2)
        assert tr.swallow_time is not None
        assert abs(tr.swallow_time - 1.0) < 1e-6

    def test_zero_capacity_is_identity(self):
        spec = DrivingSpec.single(rate=0.0)
        tr = solve_ode_point(spec, 1.0 + 2.0j, 1.0)
        assert tr.final == 1.0 + 2.0j

    def test_symmetric_two_slit_trajectory_stays_imaginary(self):
        spec = DrivingSpec.multi([lambda t: -1.0, lambda t: 1.0], [0.5, 0.5])
        tr = solve_ode_point(spec, 2j, 1.0)
        assert np.max(np.abs(tr.values.real)) < 1e-12

    def test_closed_form_along_trajectory(self):
        tr = solve_ode_point(SLIT, 1.0 + 1.5j, 1.0, t_eval=np.linspace(0, 1, 9))
        ref = vertical_slit_g(1.0 + 1.5j, tr.times)
        assert np.max(np.abs(tr.values - ref)) < 1e-8


class TestMapF:
    def test_identity_at_zero(self):
        assert map_f(SLIT, 0.3 + 2j, 0.0) == 0.3 + 2j

    def test_closed_form(self):
        assert abs(map_f(SLIT, 3j, 1.0) - 1j * np.sqrt(13)) < 1e-8

    def test_roundtrip(self):
        rng = np.random.default_rng(2)
        for _ in range(5):
            w = rng.uniform(-2, 2) + 1j * rng.uniform(0.5, 3)
            g = solve_ode_point(SLIT, w, 0.9).final
            assert abs(map_f(SLIT, g, 0.9) - w) < 1e-8

    def test_normalization_at_infinity(self):
        # |f(z) - z - A0/z| <= C/|z|^2 with C from b2, b3
        spec = DrivingSpec.single(xi=lambda t: 0.4, t_end=1.0)
        traj = evolve_series(spec, 3, 1.0)
        b1, b2, b3 = traj.b[-1]
        for R in (20.0, 40.0):
            z = R * np.exp(1j * np.pi / 3)
            dev = abs(map_f(spec, z, 1.0) - z + b1 / z)
            assert dev <= 2.0 * (abs(b2) + abs(b3) / R) / R**2 + 1e-9


class TestEvolveSeries:
    def test_vertical_slit_coefficients(self):
        traj = evolve_series(SLIT, 4, 1.0)
        assert np.allclose(traj.b[-1], [2.0, 0.0, -2.0, 0.0], atol=1e-9)
        # capacity normalization b1 = hcap(t) along the whole run
        assert np.max(np.abs(traj.b[:, 0] - 2.0 * traj.times)) < 1e-10
        assert np.max(np.abs(traj.a0 + 2.0 * traj.times)) == 0.0

    def test_zero_rate_stays_zero(self):
        spec = DrivingSpec.single(rate=0.0)
        traj = evolve_series(spec, 3, 1.0)
        assert np.max(np.abs(traj.b)) == 0.0

    def test_constant_driving_shifts_first_moment(self):
        c = 0.5
        spec = DrivingSpec.single(xi=lambda t: c, t_end=1.0)
        traj = evolve_series(spec, 3, 1.0)
        assert abs(traj.b[-1][1] - 2.0 * c) < 1e-9  # b2 = 2 t c at t = 1

    def test_monotone_capacity(self):
        spec = DrivingSpec.single(xi=lambda t: 0.3 * t, t_end=1.0)
        traj = evolve_series(spec, 2, 1.0)
        assert np.all(np.diff(-traj.a0) >= -1e-12)


class TestHull:
    def test_vertical_slit_tip(self):
        hull = trace_hull(SLIT, [0.0, 0.5, 1.0])
        assert hull.tips[0] == 0.0
        assert abs(hull.tips[-1] - 2j) < 1e-4
        assert abs(hull.tips[1] - 2j * np.sqrt(0.5)) < 1e-4

    def test_constant_driving_translates(self):
        c = 0.7
        spec = DrivingSpec.single(xi=lambda t: c, t_end=1.0)
        hull = trace_hull(spec, [0.25, 1.0])
        assert np.max(np.abs(hull.tips.real - c)) < 1e-6

    def test_mirror_symmetry(self):
        xi = lambda t: 0.4 * t + 0.1
        spec_p = DrivingSpec.single(xi=xi, t_end=0.8)
        spec_m = DrivingSpec.single(xi=lambda t: -xi(t), t_end=0.8)
        hp = trace_hull(spec_p, [0.4, 0.8])
        hm = trace_hull(spec_m, [0.4, 0.8])
        assert np.max(np.abs(hp.tips - (-np.conj(hm.tips)))) < 1e-8

    def test_requires_single_branch(self):
        spec = DrivingSpec.multi([lambda t: 0.0, lambda t: 1.0], [0.5, 0.5])
        with pytest.raises(PreconditionError):
            trace_hull(spec, [0.5])


class TestSemigroup:
    def test_two_parameter_composition(self):
        rng = np.random.default_rng(4)
        for _ in range(5):
            xi0, rate = rng.uniform(-0.5, 0.5), rng.uniform(0.5, 3.0)
            spec = DrivingSpec.single(xi=lambda t, a=xi0: a + 0.2 * t, rate=rate,
                                      t_end=0.8)
            w = rng.uniform(-1, 1) + 1j * rng.uniform(0.8, 2.0)
            tau, t = 0.3, 0.8
            direct = solve_ode_point(spec, w, t).final
            mid = solve_ode_point(spec, w, tau).final
            thru = solve_ode_point(spec, mid, t, tau=tau).final
            assert abs(direct - thru) < 1e-8


class TestVectorTime:
    def test_single_branch_identity(self):
        v = VectorTimeSpec(xis=(lambda t: 0.0,), weights=(lambda t: 1.0,),
                           q_partial=lambda t: 2.0, t1_end=1.0)
        red = vector_time_reduce(v)
        assert red.t_funcs[0](0.7) == 0.7
        assert red.spec.hcap_rate(0.5) == pytest.approx(2.0)

    def test_equal_weights_equal_clocks(self):
        v = VectorTimeSpec(xis=(lambda t: -1.0, lambda t: 1.0),
                           weights=(lambda t: 0.5, lambda t: 0.5),
                           q_partial=lambda t: 1.0, t1_end=1.0)
        red = vector_time_reduce(v)
        assert red.t_funcs[1](0.8) == pytest.approx(0.8, abs=1e-12)

    def test_three_quarters_one_quarter(self):
        v = VectorTimeSpec(xis=(lambda t: -1.0, lambda t: 1.0),
                           weights=(lambda t: 0.75, lambda t: 0.25),
                           q_partial=lambda t: 1.5, t1_end=0.9)
        red = vector_time_reduce(v)
        assert red.t_funcs[1](0.9) == pytest.approx(0.3, abs=1e-12)

    def test_reduced_flow_matches_strang_composition(self):
        v = VectorTimeSpec(xis=(lambda t: -1.0, lambda t: 1.0),
                           weights=(lambda t: 0.75, lambda t: 0.25),
                           q_partial=lambda t: 1.5, t1_end=0.9)
        red = vector_time_reduce(v)
        g_red = solve_ode_point(red.spec, 1.7j, 0.9, rtol=1e-11).final
        g_cmp = compose_per_slit_flows(v, 1.7j, 0.9, nsteps=192)
        assert abs(g_red - g_cmp) < 1e-6

    def test_vanishing_first_weight_rejected(self):
        v = VectorTimeSpec(xis=(lambda t: 0.0, lambda t: 1.0),
                           weights=(lambda t: max(0.0, 0.5 - t), lambda t: min(1.0, 0.5 + t)),
                           q_partial=lambda t: 1.0, t1_end=1.0)
        with pytest.raises(PreconditionError):
            vector_time_reduce(v)


class TestSuccessiveSlits:
    def test_single_segment_equals_single_slit(self):
        seq = successive_slits([Segment(0.0, 1.0, lambda t: 0.0, lambda t: 2.0)])
        g, sw = seq.g_point(3j)
        assert sw is None
        assert abs(g - solve_ode_point(SLIT, 3j, 1.0).final) < 1e-8

    def test_same_driving_concatenates(self):
        seq = successive_slits([
            Segment(0.0, 1.0, lambda t: 0.0, lambda t: 2.0),
            Segment(1.0, 2.0, lambda t: 0.0, lambda t: 2.0),
        ])
        one = DrivingSpec.single(t_end=2.0)
        g_seq, _ = seq.g_point(3j)
        g_one = solve_ode_point(one, 3j, 2.0).final
        assert abs(g_seq - g_one) < 1e-8
        traj = seq.evolve_series(1)
        assert abs(traj.b[-1][0] - 4.0) < 1e-8  # total capacity

    def test_two_positions_capacities_add(self):
        seq = successive_slits([
            Segment(0.0, 1.0, lambda t: -1.0, lambda t: 2.0),
            Segment(1.0, 2.0, lambda t: 1.0, lambda t: 2.0),
        ])
        traj = seq.evolve_series(2)
        assert abs(traj.b[-1][0] - 4.0) < 1e-8
        assert seq.total_hcap() == pytest.approx(4.0)

    def test_overlap_rejected(self):
        with pytest.raises(PreconditionError):
            successive_slits([
                Segment(0.0, 1.0, lambda t: 0.0, lambda t: 2.0),
                Segment(0.5, 1.5, lambda t: 1.0, lambda t: 2.0),
            ])


class TestCoefficientFlow:
    def test_zero_capacity_zero_residual(self):
        spec = DrivingSpec.single(rate=0.0)
        rep = coefficient_flow_check(spec, 4)
        assert rep["max"] < 1e-12

    def test_vertical_slit_first_coefficient(self):
        rep = coefficient_flow_check(DrivingSpec.single(t_end=1.0), 1)
        assert rep["max"] < 1e-9

    def test_offset_driving_order_six(self):
        spec = DrivingSpec.single(xi=lambda t: 0.3, t_end=1.0)
        rep = coefficient_flow_check(spec, 6, fd_step=1e-3)
        assert rep["max"] < 1e-6


class TestTimeSplitting:
    def test_constant_speed_transport(self):
        t0 = lambda x: 0.2 + 0.5 * np.exp(-(x**2))
        x = np.linspace(-5, 5, 101)
        fld = time_splitting_solve(lambda t: 1.0, t0, np.linspace(0, 0.5, 6), x,
                                   refine=16)
        assert np.max(np.abs(fld.t_values[-1] - t0(x - 0.5))) < 1e-5

    def test_constant_profile_is_stationary(self):
        x = np.linspace(-3, 3, 33)
        fld = time_splitting_solve(lambda t: t, lambda x: 0.4,
                                   np.linspace(0, 2.0, 5), x)
        assert np.max(np.abs(fld.t_values - 0.4)) == 0.0
        assert np.isinf(fld.valid_until)

    def test_gradient_blowup_detection(self):
        t0 = lambda x: np.exp(-(x**2))  # bump of height 1, width 2
        xs = np.linspace(-6, 6, 4001)
        slope = np.gradient(np.array([t0(x) for x in xs]), xs)
        s_theory = -1.0 / np.min(slope)  # xi(t) = t, so xi(t0)' = t0'
        s_star, x_star = characteristic_crossing_time(lambda t: t, t0, xs)
        assert abs(s_star - s_theory) / s_theory < 0.05
        with pytest.raises(ShockError) as err:
            time_splitting_solve(lambda t: t, t0, [0.5 * s_theory, 1.1 * s_theory],
                                 np.linspace(-5, 5, 64))
        assert err.value.x_cross is not None

    def test_asymptotic_condition_enforced(self):
        with pytest.raises(PreconditionError):
            time_splitting_solve(lambda t: 1.0, lambda x: x, [0.1],
                                 np.linspace(-1, 1, 16))

    def test_boundary_zones_constant(self):
        t0 = lambda x: 0.1 + np.exp(-(x**2))
        x = np.linspace(-8, 8, 129)
        fld = time_splitting_solve(lambda t: t, t0, [0.2], x)
        assert fld.t_values[0][0] == pytest.approx(0.1, abs=1e-9)
        assert fld.t_values[0][-1] == pytest.approx(0.1, abs=1e-9)
