"""Truncated Hamilton-Jacobi generating functions on a bi-realisation.

The degree coefficients of S_t = sum_j t^j S_j satisfy S_1 = H and

    (j + 1) S_(j+1)(m) = [t^j] H(alpha(m, sum_i t^i grad S_i(m))),

and the coefficient of t^j on the right only involves gradients of
S_1..S_j, so a single jet evaluation of H(alpha(m, P(t))) at truncation
order k-1 delivers every coefficient at once.  Gradients are produced by
running the same recursion over dual-lifted points; the recursion
therefore nests Dual layers k-1 deep at the top order.
"""

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import NewtonDiverged, UsageError
from .expressions import evaluate
from .rings import TJet, dual_lift, real_part, zero_like

__all__ = [
    "GeneratingFunction",
    "NewtonReport",
    "hj_coefficients",
    "eval_S",
    "grad_S",
    "hj_residual",
    "solve_source",
    "variation_function",
    "variation_jet",
]


@dataclass
class NewtonReport:
    iterations: int
    residual: float
    jacobian_refreshes: int = 0


@dataclass
class GeneratingFunction:
    """Truncation order k, the chart, the Hamiltonian expression, and the
    coefficient functions S (S[j] is S_(j+1), ring-generic callables)."""

    k: int
    bireal: object
    hamiltonian: object
    S: tuple

    def __repr__(self):
        return f"GeneratingFunction(k={self.k}, chart={self.bireal.name})"


def _coeff_values(h, alpha, point, upto):
    """[S_1(point), ..., S_upto(point)] in the ring of the point."""
    s1 = evaluate(h, point)
    if upto == 1:
        return [s1]
    lifted = dual_lift(point)
    sub = _coeff_values(h, alpha, lifted, upto - 1)
    n = len(point)
    order = upto - 1
    x_jets = tuple(TJet.constant(point[l], order) for l in range(n))
    p_jets = tuple(
        TJet((zero_like(point[l]),) + tuple(sub[j].g[l] for j in range(order)))
        for l in range(n)
    )
    e = evaluate(h, alpha(x_jets, p_jets))
    out = [s1]
    for j in range(1, upto):
        out.append(e.c[j] * (1.0 / (j + 1)))
    return out


def hj_coefficients(hamiltonian, bireal, k):
    """Build the order-k truncated generating function.

    ``hamiltonian`` is an Expr in the structure coordinates.  The chart's
    unit law is probed once; charts violating alpha(x, 0) = x produce
    wrong coefficients silently otherwise.
    """
    if k < 1:
        raise UsageError(f"truncation order must be >= 1, got {k}")
    probe = tuple(0.9 + 0.05 * i for i in range(bireal.dim))
    zeros = tuple(0.0 for _ in probe)
    a0 = bireal.alpha(probe, zeros)
    if max(abs(real_part(u) - v) for u, v in zip(a0, probe)) > 1e-12:
        raise UsageError("chart violates the unit law alpha(x, 0) = x")

    def make(j):
        def s_j(point):
            return _coeff_values(hamiltonian, bireal.alpha, tuple(point), j)[-1]

        s_j.__name__ = f"S_{j}"
        return s_j

    return GeneratingFunction(k, bireal, hamiltonian, tuple(make(j) for j in range(1, k + 1)))


def eval_S(gf, t, point):
    """S_t(point) = sum t^j S_j(point)."""
    vals = _coeff_values(gf.hamiltonian, gf.bireal.alpha, tuple(point), gf.k)
    acc = None
    tj = t
    for v in vals:
        term = tj * v
        acc = term if acc is None else acc + term
        tj = tj * t
    return acc


def _grad_rows(gf, point):
    """Per-degree gradients [grad S_1, ..., grad S_k] at a ring point."""
    lifted = dual_lift(tuple(point))
    vals = _coeff_values(gf.hamiltonian, gf.bireal.alpha, lifted, gf.k)
    n = len(point)
    return [tuple(v.g[l] for l in range(n)) for v in vals]


def grad_S(gf, t, point):
    """Gradient of S_t at a float point, as an ndarray."""
    rows = _grad_rows(gf, point)
    n = len(point)
    out = np.zeros(n)
    tj = t
    for row in rows:
        for l in range(n):
            out[l] += tj * real_part(row[l])
        tj *= t
    return out


def _covector(gf, t, rows, n):
    cov = []
    for l in range(n):
        acc = None
        tj = t
        for row in rows:
            term = tj * row[l]
            acc = term if acc is None else acc + term
            tj = tj * t
        cov.append(acc)
    return tuple(cov)


def hj_residual(gf, t, point):
    """|d_t S_t - H(alpha(m, d_m S_t))| at a float point and time."""
    vals = _coeff_values(gf.hamiltonian, gf.bireal.alpha, tuple(point), gf.k)
    lhs = 0.0
    for j, v in enumerate(vals, start=1):
        lhs += j * t ** (j - 1) * float(v)
    rows = _grad_rows(gf, point)
    p = _covector(gf, t, [[float(x) for x in row] for row in rows], gf.bireal.dim)
    rhs = float(evaluate(gf.hamiltonian, gf.bireal.alpha(tuple(point), p)))
    return abs(lhs - rhs)


def _residual_only(gf, t, y, x):
    """alpha(y, dS(y)) - x at float points, plus the covector norm."""
    rows = _grad_rows(gf, tuple(y))
    n = gf.bireal.dim
    p = _covector(gf, t, [[float(real_part(g)) for g in row] for row in rows], n)
    out = gf.bireal.alpha(tuple(y), p)
    r = np.array([float(real_part(o)) for o in out]) - np.asarray(x, dtype=float)
    pnorm = math.sqrt(sum(float(v) ** 2 for v in p))
    return r, pnorm


def _residual_and_jacobian(gf, t, y, x):
    n = gf.bireal.dim
    lifted = dual_lift(tuple(float(v) for v in y))
    rows = _grad_rows(gf, lifted)
    p = _covector(gf, t, rows, n)
    out = gf.bireal.alpha(lifted, p)
    r = np.empty(n)
    jac = np.empty((n, n))
    for i in range(n):
        r[i] = real_part(out[i]) - float(x[i])
        for l in range(n):
            jac[i, l] = real_part(out[i].g[l])
    pnorm = math.sqrt(sum(real_part(v) ** 2 for v in p))
    return r, jac, pnorm


def solve_source(gf, t, x, tol=1e-12, max_iter=50):
    """Solve alpha(y, d_y S_t(y)) = x for the source point y.

    Newton iteration with the analytic Jacobian; the Jacobian is reused
    while the residual contracts fast enough and refreshed otherwise.
    Raises NewtonDiverged when out of iterations, on non-finite iterates,
    or when the covector norm leaves the chart's trust region.
    """
    x = np.asarray(x, dtype=float)
    y = x.copy()
    hint = gf.bireal.domain_hint
    r, jac, pnorm = _residual_and_jacobian(gf, t, y, x)
    refreshes = 0
    last = float(np.max(np.abs(r)))
    for it in range(1, max_iter + 1):
        if not np.all(np.isfinite(r)):
            raise NewtonDiverged("non-finite residual", it, float("nan"))
        if pnorm > hint:
            raise NewtonDiverged(
                f"covector norm {pnorm:.3g} outside chart trust region {hint:.3g}",
                it,
                last,
            )
        norm = float(np.max(np.abs(r)))
        if norm <= tol:
            return y, NewtonReport(it - 1, norm, refreshes)
        try:
            step = np.linalg.solve(jac, r)
        except np.linalg.LinAlgError as exc:
            raise NewtonDiverged(f"singular Newton matrix: {exc}", it, norm) from None
        y = y - step
        r, pnorm = _residual_only(gf, t, y, x)
        new = float(np.max(np.abs(r)))
        if new > 0.25 * norm and new > tol:
            r, jac, pnorm = _residual_and_jacobian(gf, t, y, x)
            refreshes += 1
        last = new
    raise NewtonDiverged(f"no convergence in {max_iter} iterations", max_iter, last)


def variation_function(gf, t, x, tol=1e-12, max_iter=50):
    """h_t(x) = d_t S_t at the source point of x."""
    y, _ = solve_source(gf, t, x, tol, max_iter)
    vals = _coeff_values(gf.hamiltonian, gf.bireal.alpha, tuple(y), gf.k)
    h = 0.0
    for j, v in enumerate(vals, start=1):
        h += j * t ** (j - 1) * float(v)
    return h


def _shift_mul(jet, m, order):
    """t^m * jet truncated at the given order."""
    z = zero_like(jet.c[0])
    coeffs = (z,) * m + jet.c
    return TJet(coeffs[: order + 1])


def variation_jet(gf, x, order):
    """Taylor coefficients of t -> h_t(x) at t = 0, as a TJet.

    Ring-generic in x (dual entries give x-derivatives of each
    coefficient).  Uses the t-adic fixed point y <- y - (alpha(y, dS) - x),
    which gains one order per sweep since alpha(y, 0) = y.
    """
    n = gf.bireal.dim
    pt = tuple(x)
    y = [TJet.constant(v, order) for v in pt]
    for _ in range(order + 1):
        rows = _grad_rows(gf, tuple(y))
        p = []
        for l in range(n):
            # P_l(t) = sum_j t^j (grad S_j)_l, gradients already t-jets
            acc = TJet.constant(zero_like(y[l].c[0]), order)
            for j, row in enumerate(rows, start=1):
                if j <= order:
                    acc = acc + _shift_mul(row[l], j, order)
            p.append(acc)
        out = gf.bireal.alpha(tuple(y), tuple(p))
        y = [y[l] - out[l] + pt[l] for l in range(n)]
    vals = _coeff_values(gf.hamiltonian, gf.bireal.alpha, tuple(y), gf.k)
    acc = None
    for j, v in enumerate(vals, start=1):
        term = _shift_mul(v * float(j), j - 1, order)
        acc = term if acc is None else acc + term
    return acc
