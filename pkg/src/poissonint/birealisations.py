"""Bi-realisations: paired source/target submersions from T*M to M.

Each chart supplies alpha(x, p) and beta(x, p) with alpha(x, 0) =
beta(x, 0) = x.  alpha is a Poisson map from the canonical cotangent
structure ({x_i, p_j} = delta_ij) to the base structure, beta an
anti-Poisson one, and all built-in charts satisfy the time symmetry
beta(x, p) = alpha(x, -p).  Callables are ring-generic; the covector
slot is routinely fed jets of duals.
"""

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import UsageError
from .rings import Dual, dual_lift, real_part, rexp, zero_like

__all__ = [
    "BiRealisation",
    "canonical_symplectic",
    "log_canonical_bireal",
    "so3_dual_cayley",
    "alpha_jacobian",
    "bireal_for",
]


@dataclass
class BiRealisation:
    """Source/target pair over a base of dimension dim.

    domain_hint bounds the covector norm for which the chart is trusted;
    inf means globally defined.
    """

    name: str
    dim: int
    alpha: Callable
    beta: Callable
    domain_hint: float = math.inf

    def __repr__(self):
        return f"BiRealisation({self.name}, dim={self.dim})"


def canonical_symplectic(n):
    """Midpoint chart for the canonical structure on R^n, n even.

    alpha(q, p, xi_q, xi_p) = (q - xi_p/2, p + xi_q/2) and beta the
    reflection xi -> -xi of alpha.
    """
    if n % 2 != 0 or n <= 0:
        raise UsageError(f"canonical chart needs positive even dim, got {n}")
    d = n // 2

    def alpha(x, p):
        return tuple(x[i] - 0.5 * p[d + i] for i in range(d)) + tuple(
            x[d + i] + 0.5 * p[i] for i in range(d)
        )

    def beta(x, p):
        return tuple(x[i] + 0.5 * p[d + i] for i in range(d)) + tuple(
            x[d + i] - 0.5 * p[i] for i in range(d)
        )

    return BiRealisation(f"canonical_symplectic:{n}", n, alpha, beta)


def log_canonical_bireal(a):
    """Exponential chart for the log-canonical structure of matrix a.

    alpha_j = x_j exp(-(1/2) sum_i a_ij x_i p_i), beta_j the opposite
    sign in the exponent.
    """
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    if float(np.max(np.abs(a + a.T))) > 1e-12:
        raise UsageError("log-canonical chart needs an antisymmetric matrix")

    def _phase(x, p, j, sign):
        acc = None
        for i in range(n):
            if a[i, j] == 0.0:
                continue
            term = (sign * 0.5 * a[i, j]) * (x[i] * p[i])
            acc = term if acc is None else acc + term
        if acc is None:
            return None
        return rexp(acc)

    def alpha(x, p):
        out = []
        for j in range(n):
            ph = _phase(x, p, j, -1.0)
            out.append(x[j] if ph is None else x[j] * ph)
        return tuple(out)

    def beta(x, p):
        out = []
        for j in range(n):
            ph = _phase(x, p, j, +1.0)
            out.append(x[j] if ph is None else x[j] * ph)
        return tuple(out)

    return BiRealisation("log_canonical_bireal", n, alpha, beta)


def so3_dual_cayley():
    """Cayley chart on the dual of so(3).

    alpha(x, w) = x - (1/2) w x x + (1/4) (w . x) w (cross and dot),
    beta(x, w) = alpha(x, -w); beta equals the Cayley rotation of alpha.
    Trust region |w| < 2 (Cayley chart boundary), hinted at 1.9.
    """

    def _half_cross(w, x):
        return (
            0.5 * (w[1] * x[2] - w[2] * x[1]),
            0.5 * (w[2] * x[0] - w[0] * x[2]),
            0.5 * (w[0] * x[1] - w[1] * x[0]),
        )

    def alpha(x, w):
        c = _half_cross(w, x)
        d = w[0] * x[0] + w[1] * x[1] + w[2] * x[2]
        return tuple(x[i] - c[i] + 0.25 * d * w[i] for i in range(3))

    def beta(x, w):
        c = _half_cross(w, x)
        d = w[0] * x[0] + w[1] * x[1] + w[2] * x[2]
        return tuple(x[i] + c[i] + 0.25 * d * w[i] for i in range(3))

    return BiRealisation("so3_dual_cayley", 3, alpha, beta, domain_hint=1.9)


def alpha_jacobian(bireal, x, p):
    """Jacobian of alpha with respect to (x, p) jointly, shape n x 2n."""
    n = bireal.dim
    pt = tuple(x) + tuple(p)
    lifted = dual_lift(pt)
    out = bireal.alpha(lifted[:n], lifted[n:])
    jac = np.empty((n, 2 * n))
    for i in range(n):
        oi = out[i]
        if isinstance(oi, Dual):
            for j in range(2 * n):
                jac[i, j] = real_part(oi.g[j])
        else:
            jac[i, :] = 0.0
    return jac


def bireal_for(struct):
    """Built-in chart for a built-in structure."""
    if struct.name.startswith("canonical:"):
        return canonical_symplectic(struct.dim)
    if struct.name == "log_canonical":
        return log_canonical_bireal(struct.matrix)
    if struct.name == "so3_dual":
        return so3_dual_cayley()
    raise UsageError(f"no built-in bi-realisation for structure {struct.name!r}")


def covector_norm(p):
    return math.sqrt(sum(real_part(pi) ** 2 for pi in p))


def unit_law_residual(bireal, x):
    """max |alpha(x, 0) - x| and same for beta, at a float point."""
    zeros = tuple(zero_like(xi) for xi in x)
    a = bireal.alpha(tuple(x), zeros)
    b = bireal.beta(tuple(x), zeros)
    ra = max(abs(real_part(ai) - float(xi)) for ai, xi in zip(a, x))
    rb = max(abs(real_part(bi) - float(xi)) for bi, xi in zip(b, x))
    return max(ra, rb)
