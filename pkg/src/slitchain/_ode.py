"""Adaptive Dormand-Prince 5(4) integration with a state-dependent step cap.

scipy's solvers do not support a step bound that depends on the current
state, which the slit ODE needs (the vector field blows up at the driving
point), so the embedded pair is implemented here.  Supports complex state,
an optional stopping predicate, and exact hits of requested sample times.
"""

from __future__ import annotations

import numpy as np

from .errors import IntegrationError

# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)


class OdeResult:
    __slots__ = ("t", "y", "status", "t_stop", "nsteps")

    def __init__(self, t, y, status, t_stop, nsteps):
        self.t = np.asarray(t)
        self.y = np.asarray(y)
        self.status = status  # "done" or "stopped"
        self.t_stop = t_stop
        self.nsteps = nsteps


def integrate(
    f,
    t0,
    y0,
    t_end,
    rtol=1e-10,
    atol=1e-12,
    step_limit=None,
    stop=None,
    t_eval=None,
    max_steps=200_000,
    first_step=None,
):
    """Integrate y' = f(t, y) from t0 to t_end (t_end >= t0).

    ``step_limit(t, y)`` caps the next step size; ``stop(t, y)`` halts the run
    when it turns true after an accepted step (the singularity-aware cap makes
    steps collapse near a stop, so the reported stop time is sharp).  When
    ``t_eval`` is given the integrator lands on those times exactly and the
    result contains only them (plus the stop point, if any).
    """
    y = np.atleast_1d(np.asarray(y0)).astype(
        complex if np.iscomplexobj(y0) else float
    )
    t = float(t0)
    if t_end < t0:
        raise ValueError("t_end must be >= t0")

    eval_times = None if t_eval is None else list(np.sort(np.asarray(t_eval, float)))
    out_t, out_y = [], []

    def record(tc, yc):
        out_t.append(tc)
        out_y.append(yc.copy())

    if eval_times is not None:
        while eval_times and eval_times[0] <= t + 1e-15 * max(1.0, abs(t)):
            record(eval_times.pop(0), y)
    else:
        record(t, y)

    if t_end == t0:
        return OdeResult(out_t, out_y, "done", None, 0)

    k0 = f(t, y)
    span = t_end - t0
    h = first_step if first_step is not None else min(
        span / 100.0, 0.1 * (np.max(np.abs(y)) + atol) / (np.max(np.abs(k0)) + 1e-30)
    )
    h = max(h, 1e-14 * span)
    nsteps = 0

    while t < t_end:
        if nsteps >= max_steps:
            raise IntegrationError(
                f"step budget exhausted at t={t:.6g} (h={h:.3g}); "
                "the trajectory may be approaching a singularity"
            )
        if step_limit is not None:
            h = min(h, max(step_limit(t, y), 1e-14))
        target = t_end if eval_times is None or not eval_times else eval_times[0]
        hit = False
        if t + h >= target - 1e-15 * max(1.0, abs(target)):
            h = target - t
            hit = True
        if h <= 1e-15 * max(1.0, abs(t)):
            # step underflow right at a sample point: accept the landing
            h = max(h, 1e-15)

        ks = [f(t, y)]
        for i in range(1, 7):
            yi = y + h * sum(a * k for a, k in zip(_A[i], ks))
            ks.append(f(t + _C[i] * h, yi))
        y5 = y + h * sum(b * k for b, k in zip(_B5, ks))
        y4 = y + h * sum(b * k for b, k in zip(_B4, ks))
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y5))
        err = np.sqrt(np.mean(np.abs((y5 - y4) / scale) ** 2))

        if err <= 1.0 or h <= 1e-13 * max(1.0, abs(t)):
            t = t + h
            y = y5
            nsteps += 1
            if eval_times is not None:
                if hit and eval_times and abs(t - eval_times[0]) <= 1e-12 * max(1.0, abs(t)):
                    record(eval_times.pop(0), y)
                elif hit and not eval_times:
                    pass
            else:
                record(t, y)
            if stop is not None and stop(t, y):
                if eval_times is not None:
                    record(t, y)
                return OdeResult(out_t, out_y, "stopped", t, nsteps)
        factor = 0.9 * (1.0 / err) ** 0.2 if err > 0 else 5.0
        h = h * min(5.0, max(0.2, factor))

    if eval_times is not None and eval_times:
        # requested times at/after t_end within roundoff
        while eval_times:
            record(eval_times.pop(0), y)
    return OdeResult(out_t, out_y, "done", None, nsteps)
