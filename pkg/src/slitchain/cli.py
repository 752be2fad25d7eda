"""Command-line orchestration.

    slitchain <command> --config cfg.json --out dir [--seed N]
              [--tol name=value ...] [--emit-gnuplot]

Configs are strict JSON: any unknown key aborts with the key's line number.
Artifacts land in <out>/<command>-<timestamp>/; file contents are
deterministic for a fixed config and seed (timestamps appear only in the
directory name).  Exit codes: 0 success, 1 error, 2 residual tolerance
breached (check commands).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import ConfigError, SlitchainError

_REQUIRED = object()


class Cfg:
    """Strict view of a JSON object: every key must be consumed exactly once."""

    def __init__(self, data, raw_text, path="config"):
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: expected an object")
        self._data = dict(data)
        self._raw = raw_text
        self._path = path

    def _line_of(self, key):
        needle = f'"{key}"'
        for ln, line in enumerate(self._raw.splitlines(), start=1):
            if needle in line:
                return ln
        return None

    def take(self, key, default=_REQUIRED, choices=None):
        if key not in self._data:
            if default is _REQUIRED:
                raise ConfigError(f"{self._path}: missing required key '{key}'")
            return default
        val = self._data.pop(key)
        if choices is not None and val not in choices:
            raise ConfigError(
                f"{self._path}.{key}: expected one of {sorted(choices)}, got {val!r}"
            )
        return val

    def take_dict(self, key, default=_REQUIRED):
        val = self.take(key, default)
        if val is default and default is not _REQUIRED:
            return val
        return Cfg(val, self._raw, f"{self._path}.{key}")

    def done(self):
        if self._data:
            key = next(iter(self._data))
            ln = self._line_of(key)
            where = f" (line {ln})" if ln else ""
            raise ConfigError(f"{self._path}: unknown key '{key}'{where}")


# -- scalar-function and profile mini-language -------------------------------------


def make_fn(cfg: Cfg):
    kind = cfg.take("kind", choices={"const", "linear", "samples", "gauss_bump", "cos"})
    if kind == "const":
        value = float(cfg.take("value"))
        cfg.done()
        return lambda t: value
    if kind == "linear":
        offset = float(cfg.take("offset", 0.0))
        rate = float(cfg.take("rate"))
        cfg.done()
        return lambda t: offset + rate * t
    if kind == "samples":
        ts = np.asarray(cfg.take("t"), float)
        vals = np.asarray(cfg.take("values"), float)
        cfg.done()
        return lambda t: float(np.interp(t, ts, vals))
    if kind == "gauss_bump":
        base = float(cfg.take("base", 0.0))
        height = float(cfg.take("height"))
        width = float(cfg.take("width"))
        center = float(cfg.take("center", 0.0))
        cfg.done()
        return lambda x: base + height * np.exp(-(((x - center) / width) ** 2))
    # cos
    mean = float(cfg.take("mean", 0.0))
    amplitude = float(cfg.take("amplitude"))
    harmonic = int(cfg.take("harmonic", 1))
    phase = float(cfg.take("phase", 0.0))
    cfg.done()
    return lambda x: mean + amplitude * np.cos(harmonic * x + phase)


def make_driving(cfg: Cfg):
    from .loewner import Branch, DrivingSpec

    t_end = float(cfg.take("t_end"))
    branches = []
    raw_branches = cfg.take("branches")
    if not isinstance(raw_branches, list) or not raw_branches:
        raise ConfigError("driving.branches must be a nonempty list")
    for i, braw in enumerate(raw_branches):
        b = Cfg(braw, cfg._raw, f"{cfg._path}.branches[{i}]")
        xi = make_fn(b.take_dict("xi"))
        wraw = b.take("weight", 1.0)
        weight = (
            make_fn(Cfg(wraw, cfg._raw, f"{cfg._path}.branches[{i}].weight"))
            if isinstance(wraw, dict)
            else (lambda t, _w=float(wraw): _w)
        )
        b.done()
        branches.append(Branch(xi=xi, weight=weight))
    h = cfg.take_dict("hcap")
    kind = h.take("kind", choices={"linear", "samples"})
    if kind == "linear":
        rate = float(h.take("rate"))
        h.done()
        hcap = lambda t: rate * t
        hrate = lambda t: rate
    else:
        ts = np.asarray(h.take("t"), float)
        vals = np.asarray(h.take("values"), float)
        h.done()
        dv = np.gradient(vals, ts, edge_order=2)
        hcap = lambda t: float(np.interp(t, ts, vals))
        hrate = lambda t: float(np.interp(t, ts, dv))
    cfg.done()
    return DrivingSpec(tuple(branches), hcap, hrate, t_end)


# -- artifact helpers ----------------------------------------------------------------


class Sink:
    def __init__(self, out_dir: Path, command: str, emit_gnuplot: bool):
        stamp = time.strftime("%Y%m%d-%H%M%S") + f"-{time.time_ns() % 1_000_000_000}"
        self.dir = Path(out_dir) / f"{command}-{stamp}"
        self.dir.mkdir(parents=True)
        self.emit_gnuplot = emit_gnuplot

    def write_csv(self, name, header, rows):
        path = self.dir / name
        with open(path, "w") as fh:
            fh.write(header + "\n")
            for row in rows:
                fh.write(",".join(repr(float(v)) for v in row) + "\n")
        if self.emit_gnuplot:
            ncol = len(header.split(","))
            using = "1:2" if ncol >= 2 else "1"
            gp = path.with_suffix(".gp")
            gp.write_text(
                "set datafile separator ','\n"
                f"plot '{name}' using {using} with lines title '{name}'\n"
            )
        return path

    def write_json(self, name, obj):
        path = self.dir / name
        path.write_text(json.dumps(obj, sort_keys=True, indent=1) + "\n")
        return path


def _load_config(path):
    raw = Path(path).read_text()
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    return data, raw


def _coeff_in(v):
    if isinstance(v, str):
        num, _, den = v.partition("/")
        return Fraction(int(num), int(den) if den else 1)
    return v


def _coeff_out(c):
    if isinstance(c, Fraction):
        return f"{c.numerator}/{c.denominator}"
    return float(c)


# -- command handlers -----------------------------------------------------------------


def cmd_trace_slit(cfg: Cfg, sink: Sink, rng, tols):
    from .loewner import trace_hull

    driving = make_driving(cfg.take_dict("driving"))
    n = int(cfg.take("t_samples", 33))
    delta_tip = float(cfg.take("delta_tip", 1e-4))
    cfg.done()
    ts = np.linspace(0.0, driving.t_end, n)
    hull = trace_hull(driving, ts, delta_tip=delta_tip)
    sink.write_csv(
        "hull.csv", "t,re,im",
        [(t, z.real, z.imag) for t, z in zip(hull.times, hull.tips)],
    )
    sink.write_json(
        "report.json",
        {"op": "trace-slit", "tip_error_max": float(np.max(hull.tip_error)),
         "final_tip": [hull.tips[-1].real, hull.tips[-1].imag]},
    )
    return 0


def cmd_evolve_series(cfg: Cfg, sink: Sink, rng, tols):
    from .loewner import evolve_series

    driving = make_driving(cfg.take_dict("driving"))
    order = int(cfg.take("order"))
    n = int(cfg.take("t_samples", 33))
    cfg.done()
    traj = evolve_series(driving, order, driving.t_end,
                         t_eval=np.linspace(0.0, driving.t_end, n))
    header = "t,a0," + ",".join(f"b{k}" for k in range(1, order + 1))
    rows = [
        [t, a0] + list(b) for t, a0, b in zip(traj.times, traj.a0, traj.b)
    ]
    sink.write_csv("series.csv", header, rows)
    sink.write_json("report.json", {"op": "evolve-series", "order": order,
                                    "b_end": list(map(float, traj.b[-1]))})
    return 0


def cmd_split_time(cfg: Cfg, sink: Sink, rng, tols):
    from .loewner import time_splitting_solve

    xi = make_fn(cfg.take_dict("xi"))
    t0 = make_fn(cfg.take_dict("t0"))
    xg = cfg.take_dict("x")
    x_grid = np.linspace(float(xg.take("min")), float(xg.take("max")),
                         int(xg.take("n")))
    xg.done()
    sg = cfg.take_dict("s")
    s_grid = np.linspace(0.0, float(sg.take("max")), int(sg.take("n")))
    sg.done()
    cfg.done()
    fld = time_splitting_solve(xi, t0, s_grid, x_grid)
    rows = []
    for j, s in enumerate(fld.s_grid):
        for i, x in enumerate(fld.x_grid):
            rows.append((x, s, fld.t_values[j, i]))
    sink.write_csv("field.csv", "x,s,t", rows)
    sink.write_json("report.json", {"op": "split-time",
                                    "valid_until": fld.valid_until,
                                    "shock_x": fld.shock_x})
    return 0


def _kinetic_setup(cfg: Cfg):
    from .kinetic import KineticState, init_from_map
    from .loewner import map_f

    wg = cfg.take_dict("w")
    w_grid = np.linspace(float(wg.take("min")), float(wg.take("max")),
                         int(wg.take("n")))
    wg.done()
    xg = cfg.take_dict("x")
    nx = int(xg.take("n"))
    length = float(xg.take("length", 2.0 * np.pi))
    xg.done()
    x_grid = np.arange(nx) * (length / nx)

    init = cfg.take_dict("init")
    kind = init.take("kind", choices={"gaussian", "from_map"})
    if kind == "gaussian":
        eta = make_fn(init.take_dict("eta"))
        v = make_fn(init.take_dict("v"))
        width = float(init.take("width", 1.0))
        init.done()
        etax = np.array([eta(x) for x in x_grid])
        vx = np.array([v(x) for x in x_grid])
        phi = (etax[None, :] / (width * np.sqrt(np.pi))) * np.exp(
            -(((w_grid[:, None] - vx[None, :]) / width) ** 2)
        )
        return KineticState(w_grid, x_grid, phi)
    driving = make_driving(init.take_dict("driving"))
    t0 = make_fn(init.take_dict("t0"))
    init.done()
    fvals = np.empty((w_grid.size, x_grid.size), complex)
    for j, x in enumerate(x_grid):
        tj = t0(x)
        for i, w in enumerate(w_grid):
            fvals[i, j] = map_f(driving, w + 1e-6j, tj) if tj > 0 else w
    return init_from_map(fvals, w_grid, x_grid)


def _kinetic_run(cfg: Cfg):
    from .kinetic import moments, step, suggested_ds

    state = _kinetic_setup(cfg)
    s_end = float(cfg.take("s_end"))
    order = int(cfg.take("moments_order", 3))
    ds = cfg.take("ds", None)
    store_every = int(cfg.take("store_every", 1))
    cfg.done()
    ds = float(ds) if ds is not None else suggested_ds(state)
    nsteps = max(1, int(np.ceil(s_end / ds)))
    ds = s_end / nsteps
    fields = [moments(state, order)]
    mass0 = state.mass()
    for k in range(nsteps):
        state = step(state, ds)
        if (k + 1) % store_every == 0 or k == nsteps - 1:
            fields.append(moments(state, order))
    return state, fields, ds * store_every, mass0


def cmd_evolve_kinetic(cfg: Cfg, sink: Sink, rng, tols):
    state, fields, ds_out, mass0 = _kinetic_run(cfg)
    rows = []
    for f in fields:
        for n in range(f.order + 1):
            for x, val in zip(f.x_grid, f.A[n]):
                rows.append((f.s, x, n, val))
    sink.write_csv("moments.csv", "s,x,n,value", rows)
    sink.write_json(
        "meta.json",
        {"op": "evolve-kinetic", "ds_out": ds_out,
         "mass_initial": mass0, "mass_final": state.mass(),
         "convention": "x=t0, s=-t1, y=-t2"},
    )
    return 0


def cmd_evolve_chain(cfg: Cfg, sink: Sink, rng, tols):
    from .hierarchy import (
        ColdPlasmaClosure,
        ReductionClosure,
        cold_plasma_field,
        evolve_chain,
    )

    xg = cfg.take_dict("x")
    nx = int(xg.take("n"))
    length = float(xg.take("length", 2.0 * np.pi))
    xg.done()
    x_grid = np.arange(nx) * (length / nx)
    order = int(cfg.take("order", 4))

    init = cfg.take_dict("init")
    eta = make_fn(init.take_dict("eta"))
    v = make_fn(init.take_dict("v"))
    init.done()
    field = cold_plasma_field(
        x_grid, np.array([eta(x) for x in x_grid]), np.array([v(x) for x in x_grid]),
        order,
    )

    cl = cfg.take_dict("closure")
    kind = cl.take("kind", choices={"cold_plasma", "n1_reduction"})
    if kind == "cold_plasma":
        cl.done()
        closure = ColdPlasmaClosure()
    else:
        mu = make_fn(cl.take_dict("mu"))
        u = make_fn(cl.take_dict("u"))
        r_range = cl.take("r_range")
        cl.done()
        closure = ReductionClosure(mu, u, (float(r_range[0]), float(r_range[1])), order)

    s_end = float(cfg.take("s_end"))
    dt = cfg.take("dt", None)
    store_every = int(cfg.take("store_every", 1))
    cfg.done()
    hist = evolve_chain(field, closure, s_end, dt=None if dt is None else float(dt),
                        store_every=store_every)
    rows = []
    for j in range(hist.s.size):
        for n in range(order + 1):
            for x, val in zip(x_grid, hist.rows[j, n]):
                rows.append((hist.s[j], x, n, val))
    sink.write_csv("moments.csv", "s,x,n,value", rows)
    sink.write_json("meta.json", {"op": "evolve-chain", "closure": hist.closure,
                                  "order": order, "grid": [int(nx)],
                                  "convention": "x=t0, s=-t1, y=-t2"})
    return 0


def cmd_invert_series(cfg: Cfg, sink: Sink, rng, tols):
    from .series import AsymptoticSeries, h_coefficients, invert

    order = int(cfg.take("order"))
    coeffs = [_coeff_in(v) for v in cfg.take("coeffs")]
    cfg.done()
    lam = AsymptoticSeries(order, coeffs)
    inv = invert(lam)
    hs = h_coefficients(lam)
    sink.write_json(
        "inverse.json",
        {"order": order,
         "coeffs": [_coeff_out(c) for c in inv.coeffs],
         "h_coeffs": [_coeff_out(h) for h in hs]},
    )
    return 0


def cmd_faber(cfg: Cfg, sink: Sink, rng, tols):
    from .faber import faber_all, faber_derivative

    b = [float(v) for v in cfg.take("b")]
    n_max = int(cfg.take("n_max"))
    xi = cfg.take("xi", None)
    cfg.done()
    polys = faber_all(b, n_max)
    out = {"op": "faber",
           "polynomials": [{"n": p.index, "coeffs": [float(c) for c in p.coeffs]}
                           for p in polys]}
    if xi is not None:
        xi = float(xi)
        out["xi"] = xi
        out["values"] = [float(p(xi)) for p in polys]
        out["derivatives"] = [float(faber_derivative(p, xi)) for p in polys]
    sink.write_json("faber.json", out)
    return 0


def _finish_check(sink, report_obj, tol_value):
    breached = report_obj["max"] > tol_value
    report_obj["tolerance"] = tol_value
    report_obj["pass"] = not breached
    path = sink.write_json("report.json", report_obj)
    if breached:
        print(f"tolerance breached: see {path}", file=sys.stderr)
        return 2
    return 0


def cmd_check_gt(cfg: Cfg, sink: Sink, rng, tols):
    from .reduction import ReductionState, cold_plasma_fixture, gt_residual, tsarev_check

    fx_cfg = cfg.take_dict("fixture")
    kind = fx_cfg.take("kind", choices={"cold_plasma"})
    fx_cfg.done()
    fixture = cold_plasma_fixture()
    n = int(cfg.take("grid_n", 65))
    box = cfg.take("r_box", [[1.0, 2.0], [-0.5, 0.0]])
    cfg.done()
    axes = [np.linspace(float(a), float(b), n) for a, b in box]
    state = ReductionState.from_fixture(fixture, axes)
    rep_mu, rep_u = gt_residual(state.mu, state.u, state.spacings())
    rep_t = tsarev_check(state)
    worst = max(rep_mu.max, rep_u.max, rep_t.max)
    return _finish_check(
        sink,
        {"op": "check-gt", "max": worst, "gt_velocity": rep_mu.max,
         "gt_density": rep_u.max, "tsarev": rep_t.max, "grid": [n, n]},
        tols.get("gt", 1e-3),
    )


def _n1_fields(cfg: Cfg):
    from .reduction import ReductionFixture, loewner_system_integrate, n1_solve

    mu = make_fn(cfg.take_dict("mu"))
    u = make_fn(cfg.take_dict("u"))
    x0 = make_fn(cfg.take_dict("x0"))
    box = cfg.take_dict("box")
    xr = box.take("x")
    sr = box.take("s")
    yr = box.take("y")
    nn = box.take("n")
    box.done()
    z0_raw = cfg.take("z0", [0.0, 3.0])
    z0 = complex(float(z0_raw[0]), float(z0_raw[1]))
    rb = cfg.take("r_bracket", [-5.0, 5.0])
    xs = np.linspace(float(xr[0]), float(xr[1]), int(nn[0]))
    ss = np.linspace(float(sr[0]), float(sr[1]), int(nn[1]))
    ys = np.linspace(float(yr[0]), float(yr[1]), int(nn[2]))
    X, S, Y = np.meshgrid(xs, ss, ys, indexing="ij")
    pts = np.stack([X, S, Y], axis=-1)
    fields = n1_solve(mu, u, x0, pts.reshape(-1, 3),
                      r_bracket=(float(rb[0]), float(rb[1])))
    shape = X.shape
    r = fields.r.reshape(shape)
    uf = fields.u.reshape(shape)
    vf = fields.v.reshape(shape)

    fixture = ReductionFixture(
        1,
        mu=lambda rr: np.stack([mu(rr[..., 0])], axis=-1),
        u=lambda rr: u(rr[..., 0]),
        grad_u=None,
    )
    r_lo, r_hi = float(np.min(r)), float(np.max(r))
    r_tab = np.linspace(r_lo - 1e-6, r_hi + 1e-6, 1025)
    z_tab = np.empty(r_tab.size, complex)
    z_tab[0] = loewner_system_integrate(
        fixture, z0, [np.array([0.0]), np.array([r_tab[0]])]
    )
    for j in range(1, r_tab.size):
        z_tab[j] = loewner_system_integrate(
            fixture, z_tab[j - 1], [np.array([r_tab[j - 1]]), np.array([r_tab[j]])]
        )
    zf = np.interp(r, r_tab, z_tab.real) + 1j * np.interp(r, r_tab, z_tab.imag)
    spacings = (xs[1] - xs[0], ss[1] - ss[0], ys[1] - ys[0])
    return dict(r=r, u=uf, v=vf, z=zf, mu=mu, u_fn=u,
                spacings=spacings, grid=[int(n) for n in nn])


def cmd_check_dkp(cfg: Cfg, sink: Sink, rng, tols):
    from .hierarchy import zk_residual
    from .reduction import conservation_pair_residual, dkp_system_residual

    data = _n1_fields(cfg)
    cfg.done()
    dx, ds, dy = data["spacings"]
    g1, g2 = conservation_pair_residual(
        data["z"], data["u"], data["v"], dx, ds, dy
    )
    d1, d2 = dkp_system_residual(data["u"], data["v"], dx, ds, dy)
    zk = zk_residual(data["u"], dx, ds, dy, x_periodic=False)
    worst = max(g1.max, g2.max, d1.max, d2.max, float(np.max(np.abs(zk))))
    return _finish_check(
        sink,
        {"op": "check-dkp", "max": worst,
         "conservation_pair": [g1.max, g2.max],
         "dkp_system": [d1.max, d2.max],
         "zk": float(np.max(np.abs(zk))),
         "grid": data["grid"], "convention": "x=t0, s=-t1, y=-t2"},
        tols.get("dkp", 1e-2),
    )


def cmd_check_mdkp(cfg: Cfg, sink: Sink, rng, tols):
    from .hierarchy import mdkp_residual
    from .reduction import integrate_hm1

    hm1_start = float(cfg.take("hm1_start", -3.0))
    data = _n1_fields(cfg)
    cfg.done()
    dx, ds, dy = data["spacings"]
    r = data["r"]
    r_tab = np.linspace(float(np.min(r)) - 1e-6, float(np.max(r)) + 1e-6, 2049)
    hm_tab = integrate_hm1(data["mu"], data["u_fn"], r_tab, hm1_start)
    hm1 = np.interp(r, r_tab, hm_tab)
    r1, r2 = mdkp_residual(hm1, data["u"], dx, ds, dy, x_periodic=False)
    worst = max(float(np.max(np.abs(r1))), float(np.max(np.abs(r2))))
    return _finish_check(
        sink,
        {"op": "check-mdkp", "max": worst,
         "mdkp": [float(np.max(np.abs(r1))), float(np.max(np.abs(r2)))],
         "grid": data["grid"], "convention": "x=t0, s=-t1, y=-t2"},
        tols.get("mdkp", 1e-2),
    )


def cmd_bracket_check(cfg: Cfg, sink: Sink, rng, tols):
    from .grids import periodic_trapezoid
    from .hierarchy import hamiltonian_flow_check, km_bracket_apply
    from .kinetic import MomentField

    order = int(cfg.take("order", 5))
    nx = int(cfg.take("grid_n", 128))
    max_sum = int(cfg.take("pairs_max_sum", 5))
    cfg.done()
    x = np.arange(nx) * (2.0 * np.pi / nx)
    rows = np.array(
        [1.5 + 0.2 * np.cos(x + rng.uniform(0, 2 * np.pi))]
        + [
            0.1 * rng.uniform(0.5, 1.0) * np.cos((k % 3 + 1) * x + rng.uniform(0, 2 * np.pi))
            for k in range(order)
        ]
    )
    field = MomentField(x, rows)
    dx = field.dx
    f = 0.3 * np.cos(x) + 0.1 * np.sin(2 * x)
    g = 0.2 * np.cos(2 * x) - 0.4 * np.sin(x)
    worst_skew = 0.0
    for m in range(max_sum + 1):
        for n in range(max_sum + 1):
            if m + n - 1 > order or m + n - 1 < 0:
                continue
            lhs = periodic_trapezoid(f * km_bracket_apply(field, m, n, g), dx)
            rhs = periodic_trapezoid(g * km_bracket_apply(field, n, m, f), dx)
            worst_skew = max(worst_skew, abs(lhs + rhs))
    ham = hamiltonian_flow_check(field)
    worst = max(worst_skew, ham.max)
    return _finish_check(
        sink,
        {"op": "bracket-check", "max": worst, "skew_symmetry": worst_skew,
         "hamiltonian_deviation": ham.max, "grid": [nx],
         "convention": "x=t0, s=-t1, y=-t2"},
        tols.get("bracket", 1e-10),
    )


def cmd_vertex_check(cfg: Cfg, sink: Sink, rng, tols):
    from .reduction import vertex_flows

    flows = cfg.take("flows", [0, 1, 2])
    data = _n1_fields(cfg)
    cfg.done()
    dx, ds, dy = data["spacings"]
    maxima = {}
    for n in flows:
        rep = vertex_flows(data["z"], data["u"], data["v"], dx, ds, dy, int(n))
        maxima[f"flow_{n}"] = rep.max
    worst = max(maxima.values())
    return _finish_check(
        sink,
        {"op": "vertex-check", "max": worst, **maxima,
         "grid": data["grid"], "convention": "x=t0, s=-t1, y=-t2"},
        tols.get("vertex", 1e-2),
    )


def cmd_kinetic_verify(cfg: Cfg, sink: Sink, rng, tols):
    from .hierarchy import conserved_integrals
    from .kinetic import benney_residual

    kin = cfg.take_dict("kinetic")
    state, fields, ds_out, mass0 = _kinetic_run(kin)
    cfg.done()
    rep = benney_residual(fields, ds_out)
    i_first = conserved_integrals(fields[0])
    i_last = conserved_integrals(fields[-1])
    # relative drift; integrals that start near zero are scaled by unity
    scale = np.maximum(np.abs(i_first), 1.0)
    drift = float(np.max(np.abs(i_last - i_first) / scale))
    mass_drift = abs(state.mass() - mass0) / max(mass0, 1e-12)
    tol_benney = tols.get("benney", 1e-3)
    tol_drift = tols.get("drift", 1e-4)
    verdict = {
        "op": "kinetic-verify",
        "max": rep.max,
        "benney_residual": rep.max,
        "integral_drift": drift,
        "mass_drift": mass_drift,
        "integrals_initial": [float(v) for v in i_first],
        "integrals_final": [float(v) for v in i_last],
        "grid": list(rep.grid),
        "convention": "x=t0, s=-t1, y=-t2",
        "tolerance_drift": tol_drift,
    }
    code = _finish_check(sink, verdict, tol_benney)
    if code == 0 and drift > tol_drift:
        print("integral drift breached tolerance", file=sys.stderr)
        return 2
    return code


COMMANDS = {
    "trace-slit": cmd_trace_slit,
    "evolve-series": cmd_evolve_series,
    "split-time": cmd_split_time,
    "evolve-kinetic": cmd_evolve_kinetic,
    "evolve-chain": cmd_evolve_chain,
    "invert-series": cmd_invert_series,
    "faber": cmd_faber,
    "check-gt": cmd_check_gt,
    "check-dkp": cmd_check_dkp,
    "check-mdkp": cmd_check_mdkp,
    "bracket-check": cmd_bracket_check,
    "vertex-check": cmd_vertex_check,
    "kinetic-verify": cmd_kinetic_verify,
}


def _apply_thread_cap():
    cap = os.environ.get("BL_THREADS")
    if not cap:
        return
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(var, cap)


def main(argv=None) -> int:
    _apply_thread_cap()
    parser = argparse.ArgumentParser(prog="slitchain", description=__doc__)
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True)
    parser.add_argument("--out", required=True)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--tol", action="append", default=[],
                        metavar="NAME=VALUE")
    parser.add_argument("--emit-gnuplot", action="store_true")
    args = parser.parse_args(argv)

    tols = {}
    for item in args.tol:
        name, _, value = item.partition("=")
        if not value:
            print(f"bad --tol entry: {item!r}", file=sys.stderr)
            return 1
        tols[name] = float(value)

    sink = None
    try:
        data, raw = _load_config(args.config)
        cfg = Cfg(data, raw)
        cfg_tols = cfg.take("tolerances", None)
        if cfg_tols:
            merged = dict(cfg_tols)
            merged.update(tols)
            tols = merged
        sink = Sink(Path(args.out), args.command, args.emit_gnuplot)
        rng = np.random.default_rng(args.seed)
        return COMMANDS[args.command](cfg, sink, rng, tols)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        _drop_empty(sink)
        return 1
    except SlitchainError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        _drop_empty(sink)
        return 1


def _drop_empty(sink):
    if sink is not None and not any(sink.dir.iterdir()):
        sink.dir.rmdir()


if __name__ == "__main__":
    sys.exit(main())
