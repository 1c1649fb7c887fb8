"""Step maps: the Hamilton-Jacobi scheme, reference integrators, exact flows.

The hj step solves x = alpha(y, d_y S_dt(y)) for the source point y and
projects through beta; it is a Poisson map up to the truncation order of
the generating function.  RK4, the polarized Kahan scheme and the
counterexample map serve as baselines, and exact_flow supplies reference
solutions for the benchmark systems.
"""

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import NewtonDiverged, UsageError
from .generating import NewtonReport, grad_S, solve_source
from .poisson import ham_field_float
from .rings import real_part

__all__ = [
    "StepConfig",
    "StepMap",
    "NewtonReport",
    "hj_step",
    "make_hj_step",
    "rk4_step",
    "make_rk4_step",
    "kahan_lv_step",
    "counterexample_step",
    "exact_flow",
    "compose_steps",
    "strang",
]


@dataclass
class StepConfig:
    dt: float
    newton_tol: float = 1e-12
    newton_max_iter: int = 50
    allow_substep: bool = False


@dataclass
class StepMap:
    """Named map x, dt -> x with an advertised convergence order."""

    name: str
    order: int
    fn: Callable

    def __call__(self, x, dt):
        return self.fn(x, dt)


def hj_step(gf, config, x, _depth=0):
    """One step of the order-k scheme: solve the source point, push
    through the target map.

    Returns (next point, NewtonReport).  With config.allow_substep the
    step recursively halves on Newton failure, at most 4 levels deep;
    reports of substeps are aggregated.
    """
    x = np.asarray(x, dtype=float)
    dt = config.dt
    try:
        y, report = solve_source(gf, dt, x, config.newton_tol, config.newton_max_iter)
    except NewtonDiverged:
        if not config.allow_substep or _depth >= 4:
            raise
        half = StepConfig(0.5 * dt, config.newton_tol, config.newton_max_iter, True)
        mid, r1 = hj_step(gf, half, x, _depth + 1)
        out, r2 = hj_step(gf, half, mid, _depth + 1)
        return out, NewtonReport(
            r1.iterations + r2.iterations,
            max(r1.residual, r2.residual),
            r1.jacobian_refreshes + r2.jacobian_refreshes,
        )
    p = grad_S(gf, dt, tuple(y))
    out = np.array(
        [real_part(v) for v in gf.bireal.beta(tuple(y), tuple(p))], dtype=float
    )
    if not np.all(np.isfinite(out)):
        raise NewtonDiverged("non-finite target projection", report.iterations, report.residual)
    return out, report


def make_hj_step(gf, newton_tol=1e-12, newton_max_iter=50, allow_substep=False):
    def fn(x, dt):
        cfg = StepConfig(dt, newton_tol, newton_max_iter, allow_substep)
        return hj_step(gf, cfg, x)[0]

    return StepMap(f"hj:{gf.k}", gf.k, fn)


def rk4_step(struct, h, dt, x):
    """Classic fourth-order Runge-Kutta on the Hamiltonian field."""
    f = ham_field_float(struct, h)
    x = np.asarray(x, dtype=float)
    k1 = f(x)
    k2 = f(x + 0.5 * dt * k1)
    k3 = f(x + 0.5 * dt * k2)
    k4 = f(x + dt * k3)
    return x + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def make_rk4_step(struct, h):
    def fn(x, dt):
        return rk4_step(struct, h, dt, x)

    return StepMap("rk4", 4, fn)


def kahan_lv_step(a, dt, x):
    """Polarized Kahan step for the log-canonical field xdot = -x o (A x).

    Linearly implicit: [I + (dt/2)(diag(x) A + diag(A x))] x' = x.
    Conserves sum x_i exactly for antisymmetric A.
    """
    a = np.asarray(a, dtype=float)
    x = np.asarray(x, dtype=float)
    n = len(x)
    m = np.eye(n) + 0.5 * dt * (x[:, None] * a + np.diag(a @ x))
    return np.linalg.solve(m, x)


def counterexample_step(k, dt, x):
    """Scaled rotation exp(dt^k) R(dt): a Poisson map whose per-step
    deviation from the rotation flow is O(dt^k) on the unit circle, yet
    no time-dependent Hamiltonian generates it; orbits inflate by
    exp(dt^k) each step."""
    c, s = math.cos(dt), math.sin(dt)
    factor = math.exp(dt**k)
    x = np.asarray(x, dtype=float)
    return factor * np.array([c * x[0] - s * x[1], s * x[0] + c * x[1]])


def _chain_matrix(n):
    a = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            a[i, j] = 1.0
            a[j, i] = -1.0
    return a


def exact_flow(tag, t, x, inertia=(1.0, 2.0, 3.0), matrix=None):
    """Reference flows for the benchmark systems.

    harmonic            per-pair rotation (q, p) -> (q cos t + p sin t, ...)
    counterexample_2d   rotation by angle t (x^2 + y^2)
    so3_free_rigid_body high-accuracy integration of xdot = grad H x x
    lv_reparam          Lotka-Volterra flow for time f(t, H(x)),
                        f(t, u) = (e^(ut) - 1)/(u (e^(ut) + 1))
    """
    x = np.asarray(x, dtype=float)
    if tag == "harmonic":
        n = len(x)
        if n % 2 != 0:
            raise UsageError("harmonic flow needs even dimension")
        d = n // 2
        c, s = math.cos(t), math.sin(t)
        q, p = x[:d], x[d:]
        return np.concatenate([q * c + p * s, -q * s + p * c])
    if tag == "counterexample_2d":
        theta = t * float(x @ x)
        c, s = math.cos(theta), math.sin(theta)
        return np.array([c * x[0] - s * x[1], s * x[0] + c * x[1]])
    if tag == "so3_free_rigid_body":
        inr = np.asarray(inertia, dtype=float)

        def fld(_, y):
            return np.cross(y / inr, y)

        return _ivp(fld, t, x)
    if tag == "lv_reparam":
        a = _chain_matrix(len(x)) if matrix is None else np.asarray(matrix, dtype=float)
        u = float(np.sum(x))
        s = t / 2.0 if abs(u) < 1e-12 else math.tanh(u * t / 2.0) / u

        def fld(_, y):
            return -y * (a @ y)

        return _ivp(fld, s, x)
    raise UsageError(f"unknown exact flow tag {tag!r}")


def _ivp(fld, t, x):
    if t == 0.0:
        return np.asarray(x, dtype=float).copy()
    from scipy.integrate import solve_ivp

    sol = solve_ivp(
        fld, (0.0, t), np.asarray(x, dtype=float), method="DOP853",
        rtol=1e-12, atol=1e-14, dense_output=False,
    )
    if not sol.success:
        raise UsageError(f"reference integration failed: {sol.message}")
    return sol.y[:, -1]


def compose_steps(parts, name=None, order=None):
    """Sequential composition; parts are (StepMap, weight) pairs and each
    substep advances weight * dt."""
    parts = list(parts)
    if not parts:
        raise UsageError("empty composition")

    def fn(x, dt):
        out = np.asarray(x, dtype=float)
        for sub, w in parts:
            out = sub.fn(out, w * dt)
        return out

    if name is None:
        name = "+".join(s.name for s, _ in parts)
    if order is None:
        order = min(s.order for s, _ in parts)
    return StepMap(name, order, fn)


def strang(step_a, step_b, scale_a=1.0, scale_b=1.0):
    """Symmetric (1/2, 1, 1/2) composition, second order for smooth maps."""
    return compose_steps(
        [(step_a, 0.5 * scale_a), (step_b, 1.0 * scale_b), (step_a, 0.5 * scale_a)],
        name=f"strang({step_a.name},{step_b.name})",
        order=2,
    )
