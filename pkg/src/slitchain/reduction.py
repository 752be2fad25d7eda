"""N-component hydrodynamic reductions and their consistency checks.

A reduction is specified by characteristic velocities mu_i(r) and a
conservation-law density u(r) on the Riemann-invariant domain.  The shipped
exact fixture is the cold-plasma (shallow-water) reduction

    r+- = v +- 2 sqrt(eta),   mu+- = v +- sqrt(eta),   u = eta,

closed-form and verifiable by hand.  Commuting-flow speeds obey the
dispersive relation lambda_i = mu_i^2 + u; z(lambda; r) solves the reduction
ODE dz = du/(mu_i - z) along any path, path-independent on consistent data.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_simpson, solve_ivp
from scipy.interpolate import CubicSpline

from .errors import (
    DegeneracyError,
    IntegrationError,
    OrderError,
    PreconditionError,
    ShockError,
    SingularityError,
)
from .report import ResidualReport

__all__ = [
    "ReductionFixture",
    "ReductionState",
    "cold_plasma_fixture",
    "gt_residual",
    "tsarev_check",
    "ansatz_residual",
    "n1_solve",
    "N1Fields",
    "loewner_system_integrate",
    "integrate_hm1",
    "conservation_pair_residual",
    "dkp_system_residual",
    "vertex_flows",
    "hm1_flow_residual",
    "dist_residual",
    "modified_loewner_check",
    "commuting_reduction_velocity",
]

DELTA_SEP = 1e-3


@dataclass
class ReductionFixture:
    """Callable data mu_i(r), u(r) (vectorized over the last axis of r)."""

    n_components: int
    mu: object  # mu(r) -> array (..., N)
    u: object  # u(r) -> array (...)
    grad_u: object = None  # optional analytic gradient (..., N)
    v: object = None  # optional potential with dv_i = mu_i du_i


def cold_plasma_fixture() -> ReductionFixture:
    """The exact two-component reduction in Riemann invariants."""

    def mu(r):
        rp, rm = r[..., 0], r[..., 1]
        return np.stack(
            [(rp + rm) / 2.0 + (rp - rm) / 4.0, (rp + rm) / 2.0 - (rp - rm) / 4.0],
            axis=-1,
        )

    def u(r):
        rp, rm = r[..., 0], r[..., 1]
        return (rp - rm) ** 2 / 16.0

    def grad_u(r):
        rp, rm = r[..., 0], r[..., 1]
        return np.stack([(rp - rm) / 8.0, -(rp - rm) / 8.0], axis=-1)

    def v(r):
        # momentum eta * vbar: dv_i = mu_i du_i holds identically
        rp, rm = r[..., 0], r[..., 1]
        return (rp - rm) ** 2 / 16.0 * (rp + rm) / 2.0

    return ReductionFixture(2, mu, u, grad_u, v)


@dataclass
class ReductionState:
    """Fixture sampled on a tensor-product r-grid.

    ``r_axes`` are the per-component 1-D grids; mu has shape (N, *grid),
    u and v shape (*grid); lambda velocities lam = mu^2 + u.
    """

    r_axes: list
    mu: np.ndarray
    u: np.ndarray
    lam: np.ndarray
    v: np.ndarray = None

    @classmethod
    def from_fixture(cls, fixture: ReductionFixture, r_axes):
        mesh = np.stack(np.meshgrid(*r_axes, indexing="ij"), axis=-1)
        mu = np.moveaxis(fixture.mu(mesh), -1, 0)
        u = fixture.u(mesh)
        lam = mu**2 + u
        v = fixture.v(mesh) if fixture.v is not None else None
        return cls([np.asarray(a, float) for a in r_axes], mu, u, lam, v)

    @property
    def n_components(self):
        return self.mu.shape[0]

    def spacings(self):
        return [float(a[1] - a[0]) for a in self.r_axes]


def _check_separation(mu, delta_sep, what="mu"):
    n = mu.shape[0]
    for i in range(n):
        for k in range(i + 1, n):
            gap = np.abs(mu[i] - mu[k])
            if np.min(gap) < delta_sep:
                loc = np.unravel_index(np.argmin(gap), gap.shape)
                raise DegeneracyError(
                    f"{what}_{i} and {what}_{k} collide (gap {np.min(gap):.2e}) "
                    f"at grid index {loc}"
                )


def gt_residual(mu, u, spacings, delta_sep: float = DELTA_SEP):
    """Finite-difference residuals of the Gibbons-Tsarev system

        d_i mu_k = d_i u / (mu_i - mu_k),
        d_i d_k u = 2 d_i u d_k u / (mu_i - mu_k)^2,      i != k.

    The numerator of the velocity equation carries the derivative index i:
    that is the form the compatibility of d_i z = d_i u/(mu_i - z) actually
    produces, and the one the cold-plasma closed form satisfies.

    mu: (N, *grid), u: (*grid) sampled on a uniform tensor grid with the
    given per-axis spacings.  Returns (velocity residual, density residual)
    as ResidualReports over all ordered pairs i != k.
    """
    mu = np.asarray(mu, float)
    u = np.asarray(u, float)
    n = mu.shape[0]
    if n < 2:
        raise PreconditionError("Gibbons-Tsarev residual needs N >= 2 components")
    _check_separation(mu, delta_sep)
    du = [np.gradient(u, spacings[a], axis=a, edge_order=2) for a in range(n)]
    res_mu, res_u = [], []
    for i in range(n):
        for k in range(n):
            if i == k:
                continue
            dmu_k_i = np.gradient(mu[k], spacings[i], axis=i, edge_order=2)
            res_mu.append(dmu_k_i - du[i] / (mu[i] - mu[k]))
            dd = np.gradient(du[k], spacings[i], axis=i, edge_order=2)
            res_u.append(dd - 2.0 * du[i] * du[k] / (mu[i] - mu[k]) ** 2)
    grid = mu.shape[1:]
    return (
        ResidualReport.from_array("gt_residual_velocity", np.array(res_mu), grid=grid),
        ResidualReport.from_array("gt_residual_density", np.array(res_u), grid=grid),
    )


def tsarev_check(state: ReductionState, delta_sep: float = DELTA_SEP) -> ResidualReport:
    """Residual of d_i lam_k / (lam_i - lam_k) = d_i mu_k / (mu_i - mu_k)."""
    mu, lam = state.mu, state.lam
    n = state.n_components
    sp = state.spacings()
    _check_separation(mu, delta_sep)
    _check_separation(lam, delta_sep, what="lambda")
    res = []
    for i in range(n):
        for k in range(n):
            if i == k:
                continue
            dlam = np.gradient(lam[k], sp[i], axis=i, edge_order=2)
            dmu = np.gradient(mu[k], sp[i], axis=i, edge_order=2)
            res.append(dlam / (lam[i] - lam[k]) - dmu / (mu[i] - mu[k]))
    return ResidualReport.from_array("tsarev_check", np.array(res), grid=mu.shape[1:])


def ansatz_residual(F, mu_i: float, mu_k: float, u: float, du: float = 1e-5) -> float:
    """Functional-equation residual for a commuting-speed ansatz F(mu, u):

    (mu_k - mu_i) dF/du(mu_i, u) - [F(mu_k, u) - F(mu_i, u)]/(mu_k - mu_i)
                                 + dF/dmu(mu_i, u).

    Partials by centered differences with increment ``du``; zero (to rounding)
    exactly when the ansatz closes the commuting flows, e.g. F = mu^2 + u.
    """
    if mu_i == mu_k:
        raise PreconditionError("ansatz residual needs mu_i != mu_k")
    f_u = (F(mu_i, u + du) - F(mu_i, u - du)) / (2.0 * du)
    f_mu = (F(mu_i + du, u) - F(mu_i - du, u)) / (2.0 * du)
    return float(
        (mu_k - mu_i) * f_u - (F(mu_k, u) - F(mu_i, u)) / (mu_k - mu_i) + f_mu
    )


# -- one-component solve ---------------------------------------------------------


@dataclass
class N1Fields:
    r: np.ndarray
    u: np.ndarray
    v: np.ndarray


def n1_solve(
    mu,
    u,
    x0_of_r,
    points,
    r_bracket=(-10.0, 10.0),
    v_ref: float = 0.0,
    table_size: int = 4097,
    newton_tol: float = 1e-13,
) -> N1Fields:
    """Solve the one-component reduction along x = X0(r) + mu(r) s + lam(r) y.

    lam = mu^2 + u is the commuting speed; r is transported, so the implicit
    relation holds at every (x, s, y).  Vectorized safeguarded Newton; a
    nonpositive slope dX/dr signals characteristic crossing and raises
    ShockError (the solve never continues multivalued).  v integrates
    mu du along r (cumulative Simpson, v(v_ref) = 0).
    """
    pts = np.asarray(points, float)
    if pts.ndim == 1:
        pts = pts[None, :]
    x, s, y = pts[..., 0], pts[..., 1], pts[..., 2]

    def lam(r):
        return mu(r) ** 2 + u(r)

    def Xmap(r):
        return x0_of_r(r) + mu(r) * s + lam(r) * y

    lo = np.full(x.shape, float(r_bracket[0]))
    hi = np.full(x.shape, float(r_bracket[1]))
    flo, fhi = Xmap(lo) - x, Xmap(hi) - x
    if np.any(flo > 0.0) or np.any(fhi < 0.0):
        raise PreconditionError("r_bracket does not bracket the requested points")

    r = 0.5 * (lo + hi)
    h = 1e-7
    for _ in range(200):
        fr = Xmap(r) - x
        dfr = (Xmap(r + h) - Xmap(r - h)) / (2.0 * h)
        if np.any(dfr <= 0.0):
            bad = np.unravel_index(np.argmin(dfr), dfr.shape)
            raise ShockError(
                f"dX/dr <= 0 at r = {r[bad]:.6g}: characteristics crossed",
                x_cross=float(x[bad]),
            )
        lo = np.where(fr < 0.0, r, lo)
        hi = np.where(fr > 0.0, r, hi)
        step = fr / dfr
        rn = r - step
        outside = (rn <= lo) | (rn >= hi)
        rn = np.where(outside, 0.5 * (lo + hi), rn)
        done = np.max(np.abs(rn - r)) < newton_tol * max(1.0, np.max(np.abs(r)))
        r = rn
        if done:
            break
    else:
        raise IntegrationError("Newton did not converge; state may be multivalued")

    rs = np.linspace(min(v_ref, float(np.min(r))) - 1e-9,
                     max(v_ref, float(np.max(r))) + 1e-9, table_size)
    integrand = mu(rs) * np.gradient(u(rs), rs, edge_order=2)
    v_tab = cumulative_simpson(integrand, x=rs, initial=0.0)
    spline = CubicSpline(rs, v_tab - np.interp(v_ref, rs, v_tab))
    # C^2 evaluation keeps divided differences of v free of table kinks
    v = spline(r)
    return N1Fields(r=r, u=u(r), v=v)


# -- the reduction ODE for z ------------------------------------------------------


def loewner_system_integrate(
    fixture: ReductionFixture,
    z0: complex,
    r_path,
    delta_sep: float = DELTA_SEP,
    rtol: float = 1e-11,
    atol: float = 1e-13,
):
    """Integrate d_i z = d_i u / (mu_i - z) along a piecewise-linear r-path.

    ``r_path`` is a sequence of waypoints in r-space; compatibility of the
    system makes the endpoint path-independent for consistent (GT) data.
    Raises SingularityError if z comes within delta_sep of any mu_i.
    """
    path = [np.atleast_1d(np.asarray(p, float)) for p in r_path]
    n = fixture.n_components

    def grad_u(r):
        if fixture.grad_u is not None:
            return fixture.grad_u(r)
        h = 1e-6
        g = np.empty(n)
        for i in range(n):
            e = np.zeros(n)
            e[i] = h
            g[i] = (fixture.u(r + e) - fixture.u(r - e)) / (2.0 * h)
        return g

    z = complex(z0)
    for a, b in zip(path, path[1:]):
        leg = b - a

        def rhs(tau, yz):
            r = a + tau * leg
            mu = fixture.mu(r)
            du = grad_u(r)
            zz = yz[0] + 1j * yz[1]
            acc = 0.0j
            for i in range(n):
                acc += du[i] * leg[i] / (mu[i] - zz)
            return [acc.real, acc.imag]

        def too_close(tau, yz):
            r = a + tau * leg
            mu = fixture.mu(r)
            zz = yz[0] + 1j * yz[1]
            return float(np.min(np.abs(mu - zz)) - delta_sep)

        too_close.terminal = True
        sol = solve_ivp(
            rhs, (0.0, 1.0), [z.real, z.imag],
            method="RK45", rtol=rtol, atol=atol, events=too_close,
        )
        if sol.status == 1:
            r_hit = a + float(sol.t_events[0][0]) * leg
            raise SingularityError(f"z met a characteristic speed near r = {r_hit}")
        if not sol.success:
            raise IntegrationError(sol.message)
        z = complex(sol.y[0, -1], sol.y[1, -1])
    return z


def integrate_hm1(mu, u, r_grid, hm1_start: float, delta_sep: float = DELTA_SEP):
    """H^-1(r) for a one-component reduction: dH/dr = u'(r)/(mu(r) - H).

    Same ODE as the reduction system for z with real data; H^-1 must stay
    separated from mu along the integration.
    """
    r_grid = np.asarray(r_grid, float)
    du = 1e-6

    def rhs(r, yh):
        up = (u(r + du) - u(r - du)) / (2.0 * du)
        return [up / (mu(r) - yh[0])]

    def too_close(r, yh):
        return float(abs(mu(r) - yh[0]) - delta_sep)

    too_close.terminal = True
    sol = solve_ivp(
        rhs, (r_grid[0], r_grid[-1]), [hm1_start],
        t_eval=r_grid, method="RK45", rtol=1e-11, atol=1e-13, events=too_close,
    )
    if sol.status == 1:
        raise SingularityError(
            f"H^-1 met mu near r = {float(sol.t_events[0][0]):.6g}"
        )
    if not sol.success:
        raise IntegrationError(sol.message)
    return sol.y[0]


# -- residuals over (x, s, y) fields ----------------------------------------------


def _ddx(a, dx):
    return np.gradient(a, dx, axis=0, edge_order=2)


def _dds(a, ds):
    return np.gradient(a, ds, axis=1, edge_order=2)


def _ddy(a, dy):
    return np.gradient(a, dy, axis=2, edge_order=2)


def _interior(a):
    return a[1:-1, 1:-1, 1:-1]


def conservation_pair_residual(z, u, v, dx, ds, dy):
    """Residual pair of z_s + (z^2/2 + u)_x and z_y + (z^3/3 + u z + v)_x.

    Fields live on a (x, s, y) tensor grid; derivatives are second-order
    centered on the interior (the fields are not periodic).  z may be
    complex (the family parameter lambda is free, off the real axis).
    """
    z = np.asarray(z)
    r1 = _dds(z, ds) + _ddx(0.5 * z**2 + u, dx)
    r2 = _ddy(z, dy) + _ddx(z**3 / 3.0 + u * z + v, dx)
    return (
        ResidualReport.from_array("conservation_pair_1", _interior(r1)),
        ResidualReport.from_array("conservation_pair_2", _interior(r2)),
    )


def dkp_system_residual(u, v, dx, ds, dy):
    """Residual pair of v_x + u_s and v_s - u_y - u u_x.

    The second member differs in sign from the displayed pair in the source
    derivation: eliminating v must reproduce u_ss + (u_y + u u_x)_x = 0, and
    expanding the cross-derivative compatibility of the two conservation laws
    termwise yields (v_x + u_s) z_x + (v_x + u_s)_x z + (v_s - u_y - u u_x)_x
    = 0, so the flipped sign is forced; the exact one-component fixture
    satisfies it identically.
    """
    u = np.asarray(u, float)
    v = np.asarray(v, float)
    r1 = _ddx(v, dx) + _dds(u, ds)
    r2 = _dds(v, ds) - _ddy(u, dy) - u * _ddx(u, dx)
    return (
        ResidualReport.from_array("dkp_system_1", _interior(r1)),
        ResidualReport.from_array("dkp_system_2", _interior(r2)),
    )


def vertex_flows(z, u, v, dx, ds, dy, n: int) -> ResidualReport:
    """Residual of the vertex-expansion flow d_{t_n} z = (Phi_{n+1}(z)/(n+1))_x.

    The Faber coefficients of the inverse-map expansion are b_1 = -H^0 = -u,
    b_2 = -H^1 = -v; the physical derivatives attach through the sign table
    t_0 -> x, t_1 -> -s, t_2 -> -y.  Flows with n > 2 are out of scope.
    """
    if n not in (0, 1, 2):
        raise OrderError("vertex flows are implemented for n in {0, 1, 2}")
    z = np.asarray(z)
    if n == 0:
        lhs = _ddx(z, dx)
        flux = z
    elif n == 1:
        lhs = -_dds(z, ds)
        flux = 0.5 * z**2 + u
    else:
        lhs = -_ddy(z, dy)
        flux = z**3 / 3.0 + u * z + v
    res = lhs - _ddx(flux, dx)
    return ResidualReport.from_array(
        f"vertex_flow_{n}", _interior(res), convention="x=t0, s=-t1, y=-t2"
    )


def hm1_flow_residual(hm1, u, dx, ds) -> ResidualReport:
    """Residual of d_s H^-1 + (Phi_2(H^-1)/2)_x with Phi_2(w) = w^2 + 2 H^0,
    i.e. H^-1_s + ((H^-1)^2/2 + u)_x, on an (x, s) or (x, s, y) grid."""
    hm1 = np.asarray(hm1, float)
    u = np.asarray(u, float)
    res = _dds(hm1, ds) + _ddx(0.5 * hm1**2 + u, dx)
    sl = tuple([slice(1, -1)] * hm1.ndim)
    return ResidualReport.from_array("hm1_flow", res[sl])


def dist_residual(ztilde, hm1, dx, ds) -> ResidualReport:
    """Residual of the shifted conservation law
    ztilde_s + (ztilde^2/2 + H^-1 ztilde)_x (ztilde may be complex)."""
    ztilde = np.asarray(ztilde)
    res = _dds(ztilde, ds) + _ddx(0.5 * ztilde**2 + hm1 * ztilde, dx)
    sl = tuple([slice(1, -1)] * ztilde.ndim)
    return ResidualReport.from_array("dist_residual", res[sl])


def modified_loewner_check(
    fixture: ReductionFixture,
    r_axes,
    z_field,
    hm1_field,
    delta_sep: float = DELTA_SEP,
) -> ResidualReport:
    """Residual of d_i ztilde = ztilde d_i H^-1 / (mu_i - ztilde - H^-1).

    ``z_field`` and ``hm1_field`` solve the original reduction ODE on the
    tensor r-grid (so the check isolates the substitution z = ztilde + H^-1).
    The denominator equals mu_i - z and must stay >= delta_sep; z may be
    complex.
    """
    z = np.asarray(z_field)
    h = np.asarray(hm1_field, float)
    state = ReductionState.from_fixture(fixture, r_axes)
    zt = z - h
    res = []
    for i in range(state.n_components):
        den = state.mu[i] - zt - h
        if np.min(np.abs(den)) < delta_sep:
            raise SingularityError("mu_i - ztilde - H^-1 fell below delta_sep")
        sp = state.spacings()[i]
        lhs = np.gradient(zt, sp, axis=i, edge_order=2)
        rhs = zt * np.gradient(h, sp, axis=i, edge_order=2) / den
        res.append(lhs - rhs)
    return ResidualReport.from_array("modified_loewner", np.array(res))


def commuting_reduction_velocity(mu_values, z_zeta, delta_sep: float = DELTA_SEP):
    """Generating commuting-flow speeds w^i = 1 / (mu_i - z(zeta))."""
    mu_values = np.asarray(mu_values)
    gap = np.abs(mu_values - z_zeta)
    if np.min(gap) < delta_sep:
        raise SingularityError("mu_i collided with z(zeta)")
    return 1.0 / (mu_values - z_zeta)
