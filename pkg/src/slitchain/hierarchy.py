"""dKP hierarchy flows, Poisson structure, and chain evolution on moments.

Conventions.  The Lax series is lambda = z + sum A^n z^{-(n+1)} and the
bracket is {F, G} = F_z G_x - F_x G_z.  The flow generated by
L_{n+1} = (lambda^{n+1})_{>=0}/(n+1) is d(lambda)/dt_n = {L_{n+1}, lambda};
the physical times of the moment chain attach to the hierarchy times through
the vertex-flow sign table x = t0, s = -t1, y = -t2, which every report
records.  In particular the t_1 flow of A^m is +(A^{m+1}_x + m A^{m-1} A^0_x)
while the chain reads A^m_s = -(A^{m+1}_x + m A^{m-1} A^0_x).

Fields enter either as MomentField rows (numpy arrays, spectral x-derivative)
or as exact trigonometric polynomials (TrigPoly, exact derivative), through
the same windowed-Laurent code path; identities that hold in exact arithmetic
are established there and rechecked in floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.integrate import solve_ivp

from .errors import BlowUpError, IntegrationError, OrderError, PreconditionError
from .exact import TrigPoly
from .grids import (
    centered_diff_axis,
    periodic_trapezoid,
    second_diff_axis,
    spectral_dx,
)
from .kinetic import MomentField
from .report import ResidualReport
from .series import AsymptoticSeries, Laurent, invert, scale_by_inverse_int

__all__ = [
    "SIGN_TABLE",
    "lax_flow",
    "lax_flow_rows",
    "benney_rhs",
    "commutation_check",
    "commutation_check_rows",
    "evolve_chain",
    "ChainHistory",
    "ColdPlasmaClosure",
    "KineticFeedClosure",
    "ReductionClosure",
    "cold_plasma_field",
    "zk_residual",
    "conserved_integrals",
    "km_bracket_apply",
    "hamiltonian_flow_check",
    "hamiltonian_flow_check_rows",
    "ModifiedMomentField",
    "h_to_b",
    "b_to_h",
    "modified_chain_residual",
    "mdkp_residual",
    "cold_plasma_modified_run",
]

# hierarchy times vs. physical chain variables (vertex-flow convention)
SIGN_TABLE = {"t0": ("x", +1), "t1": ("s", -1), "t2": ("y", -1)}


def _dx_for_rows(rows, dx_spacing):
    if isinstance(rows[0], TrigPoly):
        def dx_op(c):
            return c.diff() if isinstance(c, TrigPoly) else 0
    else:
        def dx_op(c):
            if isinstance(c, (int, float, Fraction)):
                return 0
            return spectral_dx(c, dx_spacing)
    return dx_op


def _lambda_laurent(rows):
    return Laurent(1, [1, 0] + list(rows), floor=-(len(rows) + 1))


def _bracket(F, G, dx_op):
    """{F, G} = F_z G_x - F_x G_z on windowed Laurent expansions."""
    return F.diff_z() * G.map_coeffs(dx_op) - F.map_coeffs(dx_op) * G.diff_z()


def _lax_poly(lam, n):
    """L_n = (lambda^n)_{>=0} / n as an exact polynomial Laurent."""
    poly = lam.power(n, 0).poly_coeffs()
    coeffs = [scale_by_inverse_int(c, n) for c in poly]
    return Laurent(len(coeffs) - 1, list(reversed(coeffs)), floor=None)


def lax_flow_rows(rows, n, dx_op):
    """d A^m / d t_n for m = 0..N-n-1, from {L_{n+1}, lambda}."""
    N = len(rows) - 1
    if N < n + 2:
        raise OrderError(f"lax_flow(n={n}) needs truncation N >= {n + 2}, got {N}")
    lam = _lambda_laurent(rows)
    L = _lax_poly(lam, n + 1)
    flow = _bracket(L, lam, dx_op)
    return [flow.coeff(-(m + 1)) for m in range(N - n)]


def lax_flow(field: MomentField, n: int) -> np.ndarray:
    """Hierarchy flow rows on a moment field (spectral x-derivatives).

    Returns d A^m/d t_n for m <= N-n-1; the s-flow of the chain is the
    negative of the n=1 result (see SIGN_TABLE).
    """
    rows = list(field.A)
    out = lax_flow_rows(rows, n, _dx_for_rows(rows, field.dx))
    return np.array(out)


def benney_rhs(field_or_rows, dx_spacing=None, closure_row=None):
    """Chain right side A^m_s = -(A^{m+1}_x + m A^{m-1} A^0_x).

    Rows 0..N-1 from the field alone; row N included when ``closure_row``
    supplies A^{N+1}.
    """
    if isinstance(field_or_rows, MomentField):
        rows = list(field_or_rows.A)
        dx_spacing = field_or_rows.dx
    else:
        rows = list(field_or_rows)
    dx_op = _dx_for_rows(rows, dx_spacing)
    N = len(rows) - 1
    a0x = dx_op(rows[0])
    upper = N if closure_row is not None else N - 1
    out = []
    for m in range(upper + 1):
        nxt = rows[m + 1] if m < N else closure_row
        term = dx_op(nxt)
        if m > 0:
            term = term + m * rows[m - 1] * a0x
        out.append(-term)
    return out


def commutation_check_rows(rows, m, n, dx_op):
    """Residual polynomial of dL_m/dt_n - dL_n/dt_m + {L_m, L_n}.

    The t_n-derivative of L_m follows from the chain rule on lambda:
    d(lambda^m/m)/dt_n = lambda^{m-1} {L_n, lambda}, then the polynomial
    part.  Returns the list of polynomial coefficients (ascending).
    """
    lam = _lambda_laurent(rows)
    lo = -(len(rows) + 1)
    Lm = _lax_poly(lam, m)
    Ln = _lax_poly(lam, n)
    Fm = _bracket(Lm, lam, dx_op).truncate(lo)
    Fn = _bracket(Ln, lam, dx_op).truncate(lo)
    dLm = (lam.power(m - 1, lo) * Fn).truncate(0) if m > 1 else Laurent(0, [])
    dLn = (lam.power(n - 1, lo) * Fm).truncate(0) if n > 1 else Laurent(0, [])
    resid = dLm - dLn + _bracket(Lm, Ln, dx_op)
    return resid.poly_coeffs()


def commutation_check(field: MomentField, m: int, n: int) -> ResidualReport:
    """Zero-curvature residual for the (t_{m-1}, t_{n-1}) pair of flows."""
    rows = list(field.A)
    coeffs = commutation_check_rows(rows, m, n, _dx_for_rows(rows, field.dx))
    arr = np.array([np.asarray(c, float) for c in coeffs]) if coeffs else np.zeros(1)
    return ResidualReport.from_array(
        "commutation_check", arr, grid=(field.order + 1, field.x_grid.size),
        m=m, n=n, convention="x=t0, s=-t1, y=-t2",
    )


# -- chain evolution -----------------------------------------------------------


class ColdPlasmaClosure:
    """A^{N+1} = eta v^{N+1} with eta = A^0, v = A^1/A^0 (delta-function
    ansatz; reduces the chain to shallow water)."""

    name = "cold_plasma"

    def __call__(self, rows, s):
        eta = rows[0]
        v = rows[1] / rows[0]
        return eta * v ** len(rows)

    def validate(self, rows):
        if np.min(rows[0]) <= 0.0:
            raise PreconditionError("cold plasma closure needs A^0 = eta > 0")
        eta, v = rows[0], rows[1] / rows[0]
        for k in range(2, len(rows)):
            if np.max(np.abs(rows[k] - eta * v**k)) > 1e-8 * max(1.0, np.max(np.abs(rows[k]))):
                raise PreconditionError(
                    f"initial rows violate A^{k} = eta v^{k}; not cold-plasma data"
                )


class KineticFeedClosure:
    """A^{N+1}(x, s) interpolated in s from a concurrent kinetic run."""

    name = "kinetic_feed"

    def __init__(self, s_samples, top_rows):
        self.s_samples = np.asarray(s_samples, float)
        self.top_rows = np.asarray(top_rows, float)  # (len(s), nx)
        if self.top_rows.shape[0] != self.s_samples.size:
            raise PreconditionError("one A^{N+1} row per sample time required")

    def __call__(self, rows, s):
        j = np.searchsorted(self.s_samples, s)
        j = min(max(j, 1), self.s_samples.size - 1)
        s0, s1 = self.s_samples[j - 1], self.s_samples[j]
        th = 0.0 if s1 == s0 else np.clip((s - s0) / (s1 - s0), 0.0, 1.0)
        return (1.0 - th) * self.top_rows[j - 1] + th * self.top_rows[j]

    def validate(self, rows):
        pass


class ReductionClosure:
    """One-component reduction: A^{N+1} tabulated as a function of A^0.

    The moment functions A^n(r) follow from the reduction ODE for the inverse
    map coefficients, dH^n/dr = -u'(r) [lambda^{-(n+1)}] (mu - z)^{-1}, a
    lower-triangular system integrated from an empty reference state
    (u(r_ref) = 0), then inverted back to A-rows.  A^0 = u(r) is strictly
    monotone on the table, so A^{N+1}(A^0) is single-valued.
    """

    name = "n1_reduction"

    def __init__(self, mu, u, r_range, order, r_vacuum=None, table_size=2049, du=1e-6):
        r_lo, r_hi = r_range
        r_vacuum = r_lo if r_vacuum is None else float(r_vacuum)
        if abs(u(r_vacuum)) > 1e-10:
            raise PreconditionError(
                f"u({r_vacuum}) = {u(r_vacuum):.3e}: the H-row integration must "
                "start from a vacuum point with u = 0 (pass r_vacuum)"
            )
        rs = np.linspace(min(r_lo, r_vacuum), r_hi, table_size)
        n_rows = order + 2  # need H^0..H^{N+1}

        def uprime(r):
            return (u(r + du) - u(r - du)) / (2.0 * du)

        def rhs(r, H):
            den = Laurent(1, [-1, mu(r)] + list(H), floor=None)
            recip = den.reciprocal(-(n_rows + 1))
            up = uprime(r)
            return [-up * recip.coeff(-(k + 1)) for k in range(n_rows)]

        if not rs[0] <= r_vacuum <= rs[-1]:
            raise PreconditionError("r_vacuum must lie at or inside the table range")
        idx_left = np.where(rs < r_vacuum)[0][::-1]
        idx_right = np.where(rs >= r_vacuum)[0]
        H = np.empty((n_rows, rs.size))
        for idx in (idx_left, idx_right):
            if idx.size == 0:
                continue
            ts = rs[idx]
            sol = solve_ivp(
                rhs, (r_vacuum, ts[-1]), np.zeros(n_rows),
                t_eval=np.clip(ts, min(r_vacuum, ts[-1]), max(r_vacuum, ts[-1])),
                method="RK45", rtol=1e-11, atol=1e-13,
            )
            if not sol.success:
                raise IntegrationError(
                    f"reduction table integration failed: {sol.message}"
                )
            H[:, idx] = sol.y
        z_series = AsymptoticSeries(n_rows - 1, [-row for row in H])
        A = np.array(invert(z_series).coeffs)
        self.u_table = A[0]
        if np.any(np.diff(self.u_table) <= 0.0):
            raise PreconditionError("u(r) must be strictly increasing on the table")
        self.top_table = A[order + 1]
        self.r_table = rs

    def __call__(self, rows, s):
        return np.interp(rows[0], self.u_table, self.top_table)

    def validate(self, rows):
        if np.min(rows[0]) < self.u_table[0] or np.max(rows[0]) > self.u_table[-1]:
            raise PreconditionError("A^0 leaves the tabulated reduction range")


@dataclass
class ChainHistory:
    x_grid: np.ndarray
    s: np.ndarray
    rows: np.ndarray  # (nt, N+1, nx)
    closure: str = ""

    def field(self, j) -> MomentField:
        return MomentField(self.x_grid, self.rows[j], s=float(self.s[j]))

    def fields(self):
        return [self.field(j) for j in range(self.s.size)]


def cold_plasma_field(x_grid, eta, v, order) -> MomentField:
    """Moment rows A^n = eta v^n of a cold-plasma state."""
    x_grid = np.asarray(x_grid, float)
    eta = np.asarray(eta, float)
    v = np.asarray(v, float)
    A = np.array([eta * v**n for n in range(order + 1)])
    return MomentField(x_grid, A)


def evolve_chain(
    field: MomentField,
    closure,
    s_end: float,
    dt: float = None,
    store_every: int = 1,
    blowup: float = 1e6,
) -> ChainHistory:
    """Method-of-lines RK4 for the truncated chain, closure supplying A^{N+1}."""
    closure.validate(field.A)
    rows0 = field.A.copy()
    dx = field.dx
    if dt is None:
        eta = np.maximum(rows0[0], 1e-12)
        speed = np.max(np.abs(rows0[1] / eta) + np.sqrt(np.abs(eta))) + 1e-12
        dt = 0.4 * dx / speed
    nsteps = max(1, int(np.ceil(s_end / dt)))
    dt = s_end / nsteps

    def rhs(rows, s):
        top = closure(rows, s)
        return np.array(benney_rhs(list(rows), dx, closure_row=top))

    rows = rows0
    out_s, out_rows = [0.0], [rows.copy()]
    s = 0.0
    for k in range(nsteps):
        k1 = rhs(rows, s)
        k2 = rhs(rows + 0.5 * dt * k1, s + 0.5 * dt)
        k3 = rhs(rows + 0.5 * dt * k2, s + 0.5 * dt)
        k4 = rhs(rows + dt * k3, s + dt)
        rows = rows + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        s += dt
        if np.max(np.abs(rows)) > blowup:
            raise BlowUpError(f"field magnitude exceeded {blowup:g} at s = {s:.6g}")
        if (k + 1) % store_every == 0 or k == nsteps - 1:
            out_s.append(s)
            out_rows.append(rows.copy())
    return ChainHistory(field.x_grid, np.array(out_s), np.array(out_rows),
                        closure=getattr(closure, "name", ""))


# -- residuals and integrals -----------------------------------------------------


def zk_residual(u, dx, ds, dy, x_periodic: bool = True) -> np.ndarray:
    """Pointwise residual of u_ss + (u_y + u u_x)_x on the interior.

    ``u`` has axes (x, s, y).  s and y derivatives are centered; the x
    derivative is spectral on a periodic grid and centered otherwise (the
    reduction fields are not periodic in x).
    """
    u = np.asarray(u, float)
    if u.ndim != 3 or min(u.shape) < 3:
        raise PreconditionError("need a 3-D field with at least 3 points per axis")

    if x_periodic:
        def ddx(a):
            return spectral_dx(a, dx, axis=0)
        xin = slice(None)
    else:
        def ddx(a):
            return np.gradient(a, dx, axis=0, edge_order=2)
        xin = slice(1, -1)

    u_ss = second_diff_axis(u, ds, axis=1)
    u_y = centered_diff_axis(u, dy, axis=2)
    flux = u_y[:, 1:-1, :] + (u * ddx(u))[:, 1:-1, 1:-1]
    res = u_ss[:, :, 1:-1] + ddx(flux)
    return res[xin]


def conserved_integrals(field: MomentField) -> np.ndarray:
    """I^n = integral of H^n dx over the period, n = 0..N."""
    return periodic_trapezoid(field.h_rows(), field.dx, axis=1)


def km_bracket_apply(field: MomentField, m: int, n: int, test) -> np.ndarray:
    """{A^m, A^n}(test) = -m A^{m+n-1} d_x(test) - n d_x(A^{m+n-1} test)."""
    if m + n - 1 > field.order:
        raise OrderError(f"bracket needs row A^{m + n - 1}, field holds N = {field.order}")
    test = np.asarray(test, float)
    dx = field.dx
    amn = field.A[m + n - 1] if m + n >= 1 else None
    out = np.zeros_like(test)
    if m != 0:
        out = out - m * amn * spectral_dx(test, dx)
    if n != 0:
        out = out - n * spectral_dx(amn * test, dx)
    return out


def hamiltonian_flow_check_rows(rows, dx_spacing=None):
    """Deviation rows of the H^2 Hamiltonian flow from the chain flow.

    With the canonical bracket and Hbar^2 = (1/2) integral of H^2 dx,
    H^2 = A^2 + (A^0)^2 (variational derivatives 1/2 and A^0), the flow
    sum_n {A^m, A^n} delta Hbar^2/delta A^n equals A^m_s, i.e. minus the
    t_1 lax flow.  Returns flow[m] - chain_rhs[m] for m <= N-2; exact zero
    for TrigPoly rows.
    """
    dx_op = _dx_for_rows(rows, dx_spacing)
    flow_h = _h2_flow_rows(rows, dx_op)
    chain = benney_rhs(rows, dx_spacing)
    return [f - c for f, c in zip(flow_h, chain)]


def hamiltonian_flow_check(field: MomentField) -> ResidualReport:
    """Max deviation between the H^2 = A^2 + (A^0)^2 Hamiltonian flow and the
    chain flow (equivalently minus the t_1 lax flow), rows m <= N-2."""
    rows = list(field.A)
    dx_op = _dx_for_rows(rows, field.dx)
    flow_h = _h2_flow_rows(rows, dx_op)
    chain = benney_rhs(field)
    dev = np.array([np.asarray(f - c, float) for f, c in zip(flow_h, chain)])
    return ResidualReport.from_array(
        "hamiltonian_flow_check", dev, grid=(field.order + 1, field.x_grid.size),
        density="A^2 + (A^0)^2", normalization="Hbar = I^2/2, canonical bracket",
        convention="x=t0, s=-t1, y=-t2",
    )


def _h2_flow_rows(rows, dx_op):
    """{A^m, A^n} delta Hbar^2/delta A^n rows for m <= N-2 (n in {0, 2})."""
    N = len(rows) - 1
    if N < 3:
        raise OrderError("hamiltonian check needs truncation N >= 3")
    a0x = dx_op(rows[0])
    exact = isinstance(rows[0], TrigPoly)
    half = Fraction(1, 2) if exact else 0.5
    out = []
    for m in range(N - 1):
        t0 = -m * rows[m - 1] * a0x if m > 0 else 0 * rows[0]
        t2 = -2 * dx_op(half * rows[m + 1])
        out.append(t0 + t2)
    return out


# -- modified chain ---------------------------------------------------------------


@dataclass
class ModifiedMomentField:
    """Rows B^0(x)..B^K(x) of the modified chain."""

    x_grid: np.ndarray
    B: np.ndarray
    s: float = 0.0

    @property
    def dx(self):
        return float(self.x_grid[1] - self.x_grid[0])

    @property
    def top(self):
        return self.B.shape[0] - 1

    def shadow_h_rows(self):
        """(H^-1, H^0, H^1, ...) recovered through the substitution table."""
        return b_to_h(list(self.B))


def h_to_b(hm1, h_rows):
    """Triangular substitution (H^-1, H^0..H^K-1) -> (B^0..B^K).

    The first three entries are the displayed table; B^3 is obtained by the
    same matching that turns the modified chain rows into the conservative
    chain rows (verified symbolically in the tests):
    B^3 = H^2 - 3/2 H^-1 H^1 + 3/4 (H^-1)^2 H^0 - 3/2 (H^0)^2.
    """
    b = [hm1]
    if len(h_rows) >= 1:
        b.append(h_rows[0])
    if len(h_rows) >= 2:
        b.append(h_rows[1] - hm1 * h_rows[0] + hm1**3 / 12)
    if len(h_rows) >= 3:
        b.append(
            h_rows[2]
            - hm1 * h_rows[1] * 3 / 2
            + hm1**2 * h_rows[0] * 3 / 4
            - h_rows[0] ** 2 * 3 / 2
        )
    if len(h_rows) >= 4:
        raise OrderError("substitution table implemented through B^3 (H^2)")
    return b


def b_to_h(b_rows):
    """Inverse substitution (B^0..B^K) -> (H^-1, H^0..H^K-1)."""
    hm1 = b_rows[0]
    out = [hm1]
    if len(b_rows) >= 2:
        out.append(b_rows[1])
    if len(b_rows) >= 3:
        out.append(b_rows[2] + hm1 * b_rows[1] - hm1**3 / 12)
    if len(b_rows) >= 4:
        h0, h1 = out[1], out[2]
        out.append(b_rows[3] + hm1 * h1 * 3 / 2 - hm1**2 * h0 * 3 / 4 + h0**2 * 3 / 2)
    if len(b_rows) >= 5:
        raise OrderError("substitution table implemented through B^3 (H^2)")
    return out


def modified_chain_residual(history, ds: float) -> ResidualReport:
    """Centered-difference residual of the modified chain rows k <= K-1:

    B^k_s + B^{k+1}_x + 1/2 B^0 B^k_x + (k+1)/2 B^k B^0_x
          + k B^{k-1} (1/2 B^1 - 1/8 (B^0)^2)_x = 0.
    """
    if len(history) < 3:
        raise PreconditionError("need at least 3 equally spaced time slices")
    K = history[0].top
    dx = history[0].dx
    nx = history[0].x_grid.size
    res = np.empty((len(history) - 2, K, nx))
    for j in range(1, len(history) - 1):
        Bp, B, Bn = history[j - 1].B, history[j].B, history[j + 1].B
        b0x = spectral_dx(B[0], dx)
        aux_x = spectral_dx(0.5 * B[1] - 0.125 * B[0] ** 2, dx)
        for k in range(K):
            b_s = (Bn[k] - Bp[k]) / (2.0 * ds)
            term = (
                b_s
                + spectral_dx(B[k + 1], dx)
                + 0.5 * B[0] * spectral_dx(B[k], dx)
                + 0.5 * (k + 1) * B[k] * b0x
            )
            if k > 0:
                term = term + k * B[k - 1] * aux_x
            res[j - 1, k] = term
    return ResidualReport.from_array(
        "modified_chain_residual", res, grid=(len(history), K, nx), ds=ds
    )


def mdkp_residual(hm1, h0, dx, ds, dy, x_periodic: bool = False):
    """Residual pair of the modified dKP system on (x, s, y) grids:

    H^-1_s + (H^0 + (H^-1)^2/2)_x  and  H^0_s - H^-1_y - (H^0 H^-1 + (H^-1)^3/3)_x.
    """
    hm1 = np.asarray(hm1, float)
    h0 = np.asarray(h0, float)
    if hm1.shape != h0.shape:
        raise PreconditionError("H^-1 and H^0 grids must match")
    if hm1.ndim != 3 or min(hm1.shape) < 3:
        raise PreconditionError("need 3-D fields with at least 3 points per axis")

    if x_periodic:
        def ddx(a):
            return spectral_dx(a, dx, axis=0)
        xin = slice(None)
    else:
        def ddx(a):
            return np.gradient(a, dx, axis=0, edge_order=2)
        xin = slice(1, -1)

    hm1_s = centered_diff_axis(hm1, ds, axis=1)
    h0_s = centered_diff_axis(h0, ds, axis=1)
    hm1_y = centered_diff_axis(hm1, dy, axis=2)
    r1 = hm1_s[:, :, 1:-1] + ddx(h0 + 0.5 * hm1**2)[:, 1:-1, 1:-1]
    r2 = (
        h0_s[:, :, 1:-1]
        - hm1_y[:, 1:-1, :]
        - ddx(h0 * hm1 + hm1**3 / 3.0)[:, 1:-1, 1:-1]
    )
    return r1[xin], r2[xin]


def cold_plasma_modified_run(
    x_grid, eta0, v0, hm1_0, order, s_end, dt, store_every=1
):
    """Evolve (eta, v, H^-1) together and return matched A- and B-histories.

    eta and v follow the shallow-water form of the chain; H^-1 obeys its own
    conservation law H^-1_s = -(H^0 + (H^-1)^2/2)_x with H^0 = eta.  Lockstep
    integration avoids interpolating H^0 in time.  Requires order >= 3 so the
    H-rows feeding the B-substitution (H^-1..H^2) are available.
    """
    if order < 3:
        raise PreconditionError("need order >= 3 for the B-substitution rows")
    x_grid = np.asarray(x_grid, float)
    dx = float(x_grid[1] - x_grid[0])
    y = np.array([np.asarray(eta0, float), np.asarray(v0, float),
                  np.asarray(hm1_0, float)])

    def rhs(y):
        eta, v, h = y
        return np.array([
            -spectral_dx(eta * v, dx),
            -spectral_dx(0.5 * v**2 + eta, dx),
            -spectral_dx(eta + 0.5 * h**2, dx),
        ])

    nsteps = max(1, int(np.ceil(s_end / dt)))
    dt = s_end / nsteps
    a_fields, b_fields = [], []

    def snapshot(y, s):
        eta, v, h = y
        mf = cold_plasma_field(x_grid, eta, v, order)
        mf.s = s
        hr = mf.h_rows()
        b = np.array(h_to_b(h, [hr[0], hr[1], hr[2]]))
        a_fields.append(mf)
        b_fields.append(ModifiedMomentField(x_grid, b, s=s))

    snapshot(y, 0.0)
    s = 0.0
    for k in range(nsteps):
        k1 = rhs(y)
        k2 = rhs(y + 0.5 * dt * k1)
        k3 = rhs(y + 0.5 * dt * k2)
        k4 = rhs(y + dt * k3)
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        s += dt
        if np.max(np.abs(y)) > 1e6:
            raise BlowUpError(f"modified run blew up at s = {s:.6g}")
        if (k + 1) % store_every == 0 or k == nsteps - 1:
            snapshot(y, s)
    return a_fields, b_fields
