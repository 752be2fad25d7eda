"""Chordal Loewner dynamics in the upper half-plane.

The mapping-out flow g(w, t, tau) solves

    dg/dt = q(t) * sum_k mu_k(t) / (g - xi_k(t)),      g(w, tau, tau) = w,

where q(t) >= 0 is the growth rate of the half-plane capacity (q = -dA0/dt).
The normalized map f(., t) onto the slit complement is recovered by reversing
time, which moves trajectories away from the singularity and is therefore
always smooth for Im z > 0.  Series-valued integration propagates the
expansion g = w + sum b_n w^{-n}; the coefficient system is lower-triangular,
so truncation at any order is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from . import _ode
from .errors import IntegrationError, PreconditionError, ShockError, SingularityError
from .series import Laurent

__all__ = [
    "Branch",
    "DrivingSpec",
    "VectorTimeSpec",
    "HullTrace",
    "TimeSplitField",
    "PointTrajectory",
    "SeriesTrajectory",
    "Segment",
    "SlitSequence",
    "solve_ode_point",
    "map_f",
    "evolve_series",
    "trace_hull",
    "vector_time_reduce",
    "compose_per_slit_flows",
    "successive_slits",
    "coefficient_flow_check",
    "time_splitting_solve",
    "characteristic_crossing_time",
]

DEFAULT_EPS_SWALLOW = 1e-6
DEFAULT_DELTA_TIP = 1e-4
STEP_CLAMP_ETA = 0.1


@dataclass(frozen=True)
class Branch:
    """One slit: driving function xi(t) and weight mu(t) >= 0."""

    xi: callable
    weight: callable = staticmethod(lambda t: 1.0)


@dataclass(frozen=True)
class DrivingSpec:
    """Driving data: branches, capacity schedule hcap(t) = -A0(t), horizon."""

    branches: tuple
    hcap: callable
    hcap_rate: callable
    t_end: float
    validate: bool = True

    def __post_init__(self):
        if not self.validate:
            return
        if not self.branches:
            raise PreconditionError("at least one driving branch required")
        ts = np.linspace(0.0, self.t_end, 17)
        wsum = sum(np.array([b.weight(t) for t in ts]) for b in self.branches)
        if np.max(np.abs(wsum - 1.0)) > 1e-9:
            raise PreconditionError("branch weights must sum to 1 for all t")
        if abs(self.hcap(0.0)) > 1e-12:
            raise PreconditionError("hcap(0) must vanish")
        rates = np.array([self.hcap_rate(t) for t in ts])
        if np.min(rates) < -1e-12:
            raise PreconditionError("hcap must be nondecreasing (rate >= 0)")

    @classmethod
    def single(cls, xi=None, rate=2.0, t_end=1.0):
        """One slit with a constant capacity growth rate (default hcap = 2t)."""
        xi = xi if xi is not None else (lambda t: 0.0)
        return cls(
            branches=(Branch(xi=xi),),
            hcap=lambda t: rate * t,
            hcap_rate=lambda t: rate,
            t_end=t_end,
        )

    @classmethod
    def multi(cls, xis, weights, rate=2.0, t_end=1.0):
        branches = tuple(
            Branch(xi=x, weight=w if callable(w) else (lambda t, _w=w: _w))
            for x, w in zip(xis, weights)
        )
        return cls(branches, lambda t: rate * t, lambda t: rate, t_end)

    @property
    def m(self):
        return len(self.branches)

    def a0(self, t):
        """A0(t) = -hcap(t) in the normalization f = z + A0/z + O(z^-2)."""
        return -self.hcap(t)


@dataclass
class PointTrajectory:
    times: np.ndarray
    values: np.ndarray
    swallow_time: float | None = None

    @property
    def final(self):
        return self.values[-1]


@dataclass
class SeriesTrajectory:
    """Coefficients b_n(t) of g(w,t) = w + sum b_n w^{-n} and A0(t)."""

    times: np.ndarray
    b: np.ndarray  # shape (len(times), N)
    a0: np.ndarray
    _dense: object = None

    @property
    def order(self):
        return self.b.shape[1]

    def sample(self, t):
        if self._dense is None:
            raise PreconditionError("trajectory was not stored with dense output")
        return self._dense(t)


@dataclass
class HullTrace:
    times: np.ndarray
    tips: np.ndarray
    tip_error: np.ndarray


@dataclass
class TimeSplitField:
    x_grid: np.ndarray
    s_grid: np.ndarray
    t_values: np.ndarray  # shape (len(s_grid), len(x_grid))
    valid_until: float
    shock_x: float | None = None


def _rhs(spec):
    branches = spec.branches

    def f(t, y):
        g = y[0]
        q = spec.hcap_rate(t)
        acc = 0.0j
        for br in branches:
            acc += br.weight(t) / (g - br.xi(t))
        return np.array([q * acc])

    return f


def _step_limit(spec):
    def lim(t, y):
        q = spec.hcap_rate(t)
        if q <= 0.0:
            return math.inf
        d = min(abs(y[0] - br.xi(t)) for br in spec.branches)
        return STEP_CLAMP_ETA * d * d / q

    return lim


def _swallow_stop(spec, eps):
    def stop(t, y):
        return min(abs(y[0] - br.xi(t)) for br in spec.branches) < eps

    return stop


def solve_ode_point(
    spec: DrivingSpec,
    w: complex,
    t_end: float,
    tau: float = 0.0,
    t_eval=None,
    eps_swallow: float = DEFAULT_EPS_SWALLOW,
    rtol: float = 1e-10,
    atol: float = 1e-12,
) -> PointTrajectory:
    """Trajectory g(w, t, tau) for t in [tau, t_end].

    A point absorbed by the hull is reported through ``swallow_time`` (the
    trajectory ends there); this is an event, not an error.
    """
    if not tau <= t_end <= spec.t_end + 1e-12:
        raise PreconditionError("need tau <= t_end <= spec.t_end")
    res = _ode.integrate(
        _rhs(spec),
        tau,
        np.array([complex(w)]),
        t_end,
        rtol=rtol,
        atol=atol,
        step_limit=_step_limit(spec),
        stop=_swallow_stop(spec, eps_swallow),
        t_eval=t_eval,
    )
    swallow = res.t_stop if res.status == "stopped" else None
    return PointTrajectory(res.t, res.y[:, 0], swallow)


def map_f(
    spec: DrivingSpec,
    z: complex,
    t: float,
    rtol: float = 1e-10,
    atol: float = 1e-12,
) -> complex:
    """f(z, t): inverse of g(., t, 0), by reverse-time integration.

    Smooth for Im z > 0 (the reversed flow moves away from the hull).  For
    real z over the swallowed footprint the backward trajectory meets the
    driving point and a SingularityError is raised.
    """
    if t < 0 or t > spec.t_end + 1e-12:
        raise PreconditionError("time outside the spec horizon")
    if t == 0:
        return complex(z)

    def f_rev(u, y):
        g = y[0]
        tt = t - u
        q = spec.hcap_rate(tt)
        acc = 0.0j
        for br in spec.branches:
            acc += br.weight(tt) / (g - br.xi(tt))
        return np.array([-q * acc])

    def lim(u, y):
        tt = t - u
        q = spec.hcap_rate(tt)
        if q <= 0.0:
            return math.inf
        d = min(abs(y[0] - br.xi(tt)) for br in spec.branches)
        return STEP_CLAMP_ETA * d * d / q

    def stop(u, y):
        tt = t - u
        return min(abs(y[0] - br.xi(tt)) for br in spec.branches) < 1e-12

    res = _ode.integrate(
        f_rev, 0.0, np.array([complex(z)]), t,
        rtol=rtol, atol=atol, step_limit=lim, stop=stop,
    )
    if res.status == "stopped":
        raise SingularityError(f"f({z}, {t}): point lies on the hull boundary")
    return complex(res.y[-1, 0])


def evolve_series(
    spec: DrivingSpec,
    order: int,
    t_end: float,
    t_eval=None,
    rtol: float = 1e-11,
    atol: float = 1e-13,
) -> SeriesTrajectory:
    """Coefficient trajectories b_1..b_order of g(w, t) = w + sum b_n w^-n.

    The right side expands q(t) * sum_k mu_k / (g - xi_k) at infinity through
    series division; the dependency is lower-triangular so the truncated
    system is exact.  b_1(t) equals hcap(t) identically.
    """
    if order < 1:
        raise PreconditionError("series order must be >= 1")
    if t_eval is None:
        t_eval = np.linspace(0.0, t_end, 33)

    def rhs(t, b):
        g = Laurent(1, [1, 0] + list(b))
        q = spec.hcap_rate(t)
        out = np.zeros(order)
        for br in spec.branches:
            recip = (g - Laurent(0, [br.xi(t)])).reciprocal(-order)
            wgt = br.weight(t)
            for n in range(1, order + 1):
                out[n - 1] += wgt * recip.coeff(-n)
        return q * out

    sol = solve_ivp(
        rhs, (0.0, t_end), np.zeros(order),
        method="RK45", rtol=rtol, atol=atol, t_eval=np.asarray(t_eval, float),
        dense_output=True,
    )
    if not sol.success:
        raise IntegrationError(f"series integration failed: {sol.message}")
    times = sol.t
    return SeriesTrajectory(
        times=times,
        b=sol.y.T.copy(),
        a0=-np.array([spec.hcap(t) for t in times]),
        _dense=sol.sol,
    )


def trace_hull(
    spec: DrivingSpec,
    t_grid,
    delta_tip: float = DEFAULT_DELTA_TIP,
    rtol: float = 1e-10,
) -> HullTrace:
    """Slit tips gamma(t) = f(xi_t + i*delta, t) for a single branch.

    The estimated error per tip is the spread between the delta and 2*delta
    evaluations (accuracy degrades as the start point approaches the
    singularity of the reversed flow).
    """
    if spec.m != 1:
        raise PreconditionError("hull tracing requires a single branch")
    xi = spec.branches[0].xi
    t_grid = np.asarray(t_grid, float)
    tips = np.empty(t_grid.size, dtype=complex)
    errs = np.empty(t_grid.size)
    for i, t in enumerate(t_grid):
        if t == 0.0:
            tips[i] = complex(xi(0.0))
            errs[i] = 0.0
            continue
        z1 = map_f(spec, xi(t) + 1j * delta_tip, t, rtol=rtol)
        z2 = map_f(spec, xi(t) + 2j * delta_tip, t, rtol=rtol)
        tips[i] = z1
        errs[i] = abs(z1 - z2)
    return HullTrace(t_grid, tips, errs)


# -- vector time --------------------------------------------------------------


@dataclass(frozen=True)
class VectorTimeSpec:
    """Vector-time driving: per-coordinate xi_k(t_k), weights mu_k(t1), and
    the common capacity partial q_partial(t1) = -dA0/dt_k.

    The equal-partials constraint is honored by construction: one scalar
    clock t1 drives every coordinate, so dA0/dt_k is the same function for
    all k.
    """

    xis: tuple  # xi_k as functions of their own time t_k
    weights: tuple  # mu_k as functions of the clock t1
    q_partial: callable
    t1_end: float

    @property
    def m(self):
        return len(self.xis)


@dataclass
class VectorTimeReduction:
    t_funcs: list  # t_k(t1), callables
    spec: DrivingSpec


def vector_time_reduce(vspec: VectorTimeSpec, samples: int = 257) -> VectorTimeReduction:
    """Reparametrize vector time onto the first clock: dt_k/dt1 = mu_k/mu_1.

    Returns the reparametrizations t_k(t1) and the equivalent single-time
    multi-slit spec, whose capacity rate is q_partial/mu_1 (A0 -> A0/mu_1).
    """
    ts = np.linspace(0.0, vspec.t1_end, samples)
    mu1 = np.array([vspec.weights[0](t) for t in ts])
    if np.min(mu1) <= 0.0:
        raise PreconditionError("weight mu_1 must stay positive on the span")

    t_funcs = []
    for k in range(vspec.m):
        if k == 0:
            t_funcs.append(lambda t1: t1)
            continue
        ratio = np.array([vspec.weights[k](t) / vspec.weights[0](t) for t in ts])
        tk = np.concatenate(
            [[0.0], np.cumsum(0.5 * (ratio[1:] + ratio[:-1]) * np.diff(ts))]
        )
        t_funcs.append(lambda t1, _ts=ts, _tk=tk: float(np.interp(t1, _ts, _tk)))

    branches = tuple(
        Branch(
            xi=lambda t1, _k=k: vspec.xis[_k](t_funcs[_k](t1)),
            weight=vspec.weights[k],
        )
        for k in range(vspec.m)
    )

    def rate(t1):
        return vspec.q_partial(t1) / vspec.weights[0](t1)

    hs = np.array([rate(t) for t in ts])
    cumh = np.concatenate([[0.0], np.cumsum(0.5 * (hs[1:] + hs[:-1]) * np.diff(ts))])
    spec = DrivingSpec(
        branches=branches,
        hcap=lambda t1: float(np.interp(t1, ts, cumh)),
        hcap_rate=rate,
        t_end=vspec.t1_end,
    )
    return VectorTimeReduction(t_funcs, spec)


def compose_per_slit_flows(
    vspec: VectorTimeSpec, w: complex, t1_end: float, nsteps: int = 128
) -> complex:
    """Strang composition of the per-slit vector-time flows.

    Independent route for the vector-time consistency check: over each clock
    substep only one slit grows, advancing its own time by dt_k =
    (mu_k/mu_1) dt1 under the common capacity partial.
    """
    red = vector_time_reduce(vspec)
    g = complex(w)
    h = t1_end / nsteps

    def substep(k, t1a, t1b):
        nonlocal g
        ta, tb = red.t_funcs[k](t1a), red.t_funcs[k](t1b)
        if tb <= ta:
            return
        qk = vspec.q_partial(0.5 * (t1a + t1b))
        sub = DrivingSpec(
            branches=(Branch(xi=vspec.xis[k]),),
            hcap=lambda t, _a=ta, _q=qk: _q * (t - _a),
            hcap_rate=lambda t, _q=qk: _q,
            t_end=tb,
            validate=False,
        )
        res = _ode.integrate(
            _rhs(sub), ta, np.array([g]), tb,
            rtol=1e-11, atol=1e-13, step_limit=_step_limit(sub),
        )
        g = complex(res.y[-1, 0])

    ks = list(range(vspec.m))
    for i in range(nsteps):
        t1a, t1b = i * h, (i + 1) * h
        mid = 0.5 * (t1a + t1b)
        for k in ks[:-1]:
            substep(k, t1a, mid)
        substep(ks[-1], t1a, t1b)
        for k in reversed(ks[:-1]):
            substep(k, mid, t1b)
    return g


# -- successive slits ----------------------------------------------------------


@dataclass(frozen=True)
class Segment:
    """One successive-slit segment active on (t_start, t_end]."""

    t_start: float
    t_end: float
    xi: callable
    hcap_rate: callable

    def hcap_gain(self):
        ts = np.linspace(self.t_start, self.t_end, 65)
        rs = np.array([self.hcap_rate(t) for t in ts])
        return float(np.trapezoid(rs, ts))


class SlitSequence:
    """Piecewise driving where each slit grows on its own interval.

    The flow map is the composition of the per-segment single-slit maps
    (the ODE is autonomous in g, so the two-parameter semigroup composes)
    and the total capacity is the sum of the per-segment capacities.
    """

    def __init__(self, segments):
        segments = sorted(segments, key=lambda s: s.t_start)
        for a, b in zip(segments, segments[1:]):
            if b.t_start < a.t_end - 1e-12:
                raise PreconditionError(
                    f"segments overlap: ({a.t_start}, {a.t_end}) and "
                    f"({b.t_start}, {b.t_end})"
                )
        if segments[0].t_start != 0.0:
            raise PreconditionError("first segment must start at t = 0")
        self.segments = segments

    @property
    def t_end(self):
        return self.segments[-1].t_end

    def total_hcap(self):
        return sum(seg.hcap_gain() for seg in self.segments)

    def _segment_spec(self, seg):
        return DrivingSpec(
            branches=(Branch(xi=seg.xi),),
            hcap=lambda t, _s=seg: max(0.0, _local_hcap(_s, t)),
            hcap_rate=lambda t, _s=seg: (
                _s.hcap_rate(t) if _s.t_start <= t <= _s.t_end else 0.0
            ),
            t_end=seg.t_end,
        )

    def g_point(self, w: complex, eps_swallow: float = DEFAULT_EPS_SWALLOW):
        """g(w, T_m) through all segments; returns (value, swallow_time|None)."""
        g = complex(w)
        for seg in self.segments:
            spec = self._segment_spec(seg)
            res = _ode.integrate(
                _rhs(spec), seg.t_start, np.array([g]), seg.t_end,
                rtol=1e-10, atol=1e-12,
                step_limit=_step_limit(spec),
                stop=_swallow_stop(spec, eps_swallow),
            )
            if res.status == "stopped":
                return complex(res.y[-1, 0]), res.t_stop
            g = complex(res.y[-1, 0])
        return g, None

    def evolve_series(self, order: int, samples_per_segment: int = 17) -> SeriesTrajectory:
        """Series coefficients through the segment chain (b is continuous)."""
        b = np.zeros(order)
        all_t, all_b = [0.0], [b.copy()]
        for seg in self.segments:
            spec = self._segment_spec(seg)

            def rhs(t, bb, _seg=seg, _spec=spec):
                g = Laurent(1, [1, 0] + list(bb))
                q = _spec.hcap_rate(t)
                recip = (g - Laurent(0, [_seg.xi(t)])).reciprocal(-order)
                return q * np.array([recip.coeff(-n) for n in range(1, order + 1)])

            teval = np.linspace(seg.t_start, seg.t_end, samples_per_segment)
            sol = solve_ivp(
                rhs, (seg.t_start, seg.t_end), b,
                method="RK45", rtol=1e-11, atol=1e-13, t_eval=teval,
            )
            if not sol.success:
                raise IntegrationError(sol.message)
            all_t.extend(sol.t[1:].tolist())
            all_b.extend(list(sol.y.T[1:]))
            b = sol.y[:, -1].copy()
        times = np.array(all_t)
        return SeriesTrajectory(
            times, np.array(all_b),
            a0=-np.array([_sequence_hcap(self, t) for t in times]),
        )


def _local_hcap(seg, t):
    if t <= seg.t_start:
        return 0.0
    t = min(t, seg.t_end)
    ts = np.linspace(seg.t_start, t, 33)
    return float(np.trapezoid([seg.hcap_rate(u) for u in ts], ts))


def _sequence_hcap(seq, t):
    return sum(_local_hcap(seg, t) for seg in seq.segments)


def successive_slits(segments) -> SlitSequence:
    """Successive-slit composition from Segment objects or (t0, t1, xi, rate)."""
    return SlitSequence([s if isinstance(s, Segment) else Segment(*s) for s in segments])


# -- coefficient flow -----------------------------------------------------------


def coefficient_flow_check(
    spec: DrivingSpec,
    order: int,
    t_grid=None,
    fd_step: float = 1e-3,
):
    """Residuals of n * db_n/dt + (dA0/dt) * Phi'_n(xi_t) for n <= order.

    db_n/dt comes from evolve_series by 4th-order centered differences at
    step ``fd_step``, with every stencil point landed exactly by the
    integrator (a dense interpolant would put noise under the divided
    difference).  Since dA0/dt = -q the residual is n*bdot_n - q*Phi'_n(xi_t).
    """
    from .faber import faber_all, faber_derivative

    if spec.m != 1:
        raise PreconditionError("coefficient flow check requires a single branch")
    xi = spec.branches[0].xi
    if t_grid is None:
        t_grid = np.linspace(0.2 * spec.t_end, 0.8 * spec.t_end, 7)
    t_grid = np.asarray(t_grid, float)
    offsets = np.array([-2.0, -1.0, 0.0, 1.0, 2.0]) * fd_step
    stencil = np.unique((t_grid[:, None] + offsets[None, :]).ravel())
    traj = evolve_series(spec, order, spec.t_end, t_eval=stencil)

    def at(t):
        j = int(np.argmin(np.abs(traj.times - t)))
        return traj.b[j]

    table = np.empty((len(t_grid), order))
    for i, t in enumerate(t_grid):
        bm2, bm1, b0, bp1, bp2 = (at(t + o) for o in offsets)
        bdot = (bm2 - 8.0 * bm1 + 8.0 * bp1 - bp2) / (12.0 * fd_step)
        polys = faber_all(list(b0), order)
        q = spec.hcap_rate(t)
        for n in range(1, order + 1):
            table[i, n - 1] = n * bdot[n - 1] - q * faber_derivative(polys[n], xi(t))
    return {
        "max": float(np.max(np.abs(table))),
        "table": table,
        "t_grid": np.asarray(t_grid, float),
    }


# -- time splitting --------------------------------------------------------------


def characteristic_crossing_time(xi, t0_profile, x_lattice):
    """First crossing of the straight characteristics x0 + xi(t0(x0)) s.

    Exact for the discrete lattice: adjacent characteristics meet at
    s = -dx/dc wherever the speed increment dc is negative.
    """
    x0 = np.asarray(x_lattice, float)
    t0 = np.array([t0_profile(x) for x in x0])
    c = np.array([xi(t) for t in t0])
    dxs = np.diff(x0)
    dcs = np.diff(c)
    with np.errstate(divide="ignore"):
        s_cross = np.where(dcs < 0.0, dxs / np.where(dcs < 0, -dcs, 1.0), np.inf)
    j = int(np.argmin(s_cross))
    s_star = float(s_cross[j])
    x_star = float(x0[j] + c[j] * s_star) if np.isfinite(s_star) else None
    return s_star, x_star


def time_splitting_solve(
    xi,
    t0_profile,
    s_grid,
    x_grid,
    refine: int = 4,
) -> TimeSplitField:
    """Solve xi(t) t_x + t_s = 0 by tracing straight characteristics.

    t is constant along dx/ds = xi(t), so characteristics are the lines
    x(s) = x0 + xi(t0(x0)) s.  The initial profile must equal a common
    constant outside a compact window (asymptotic condition); the field takes
    that constant outside the traced fan.  Requesting s at or past the first
    characteristic crossing raises ShockError naming the crossing location.
    """
    x_grid = np.asarray(x_grid, float)
    s_grid = np.asarray(s_grid, float)
    if np.any(s_grid < 0.0):
        raise PreconditionError("s_grid must be nonnegative")
    span = x_grid[-1] - x_grid[0]
    probe = np.array([t0_profile(x) for x in np.linspace(x_grid[0], x_grid[-1], 257)])
    cmax = max(abs(xi(t)) for t in np.linspace(probe.min(), probe.max(), 65))
    pad = cmax * float(np.max(s_grid, initial=0.0)) + 0.1 * span + 1e-9
    n_lat = refine * x_grid.size + 1
    x0 = np.linspace(x_grid[0] - pad, x_grid[-1] + pad, n_lat)
    t0 = np.array([t0_profile(x) for x in x0])

    edge = max(3, n_lat // 50)
    left, right = t0[:edge], t0[-edge:]
    if np.ptp(left) > 1e-10 or np.ptp(right) > 1e-10 or abs(left[0] - right[-1]) > 1e-10:
        raise PreconditionError(
            "initial profile must equal a common constant outside a compact window"
        )

    c = np.array([xi(t) for t in t0])
    s_star, x_star = characteristic_crossing_time(xi, t0_profile, x0)
    if float(np.max(s_grid, initial=0.0)) >= s_star:
        raise ShockError(
            f"characteristics cross at s = {s_star:.6g} near x = {x_star:.6g}",
            s_cross=s_star,
            x_cross=x_star,
        )

    t_values = np.empty((s_grid.size, x_grid.size))
    for j, s in enumerate(s_grid):
        t_values[j] = np.interp(x_grid, x0 + c * s, t0)
    return TimeSplitField(x_grid, s_grid, t_values, valid_until=s_star, shock_x=x_star)
