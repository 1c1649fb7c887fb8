"""Poisson structures: bracket, Hamiltonian fields, Jacobi diagnostics.

A structure is its tensor field pi(x); the bracket is
{F, G}(x) = grad F . pi(x) grad G and Hamiltonian dynamics follow
xdot = pi(x) grad H.  Tensor callables must be generic over the scalar
ring (they are differentiated with dual numbers for the Jacobi check).
"""

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Callable, Optional

import numpy as np

from .errors import UsageError
from .expressions import evaluate, parse
from .rings import Dual, dual_lift, real_part, zero_like

__all__ = [
    "PoissonStructure",
    "bracket",
    "ham_vector_field",
    "ham_field_float",
    "jacobi_residual",
    "antisymmetry_residual",
    "canonical",
    "log_canonical",
    "so3_dual",
    "counterexample_2d",
    "from_id",
]


@dataclass
class PoissonStructure:
    """Poisson tensor with coordinate names and known Casimirs.

    Attributes
    ----------
    name : str
        Identifier, stable across runs.
    dim : int
    coords : tuple of str
        Coordinate names used when parsing Hamiltonians.
    tensor : callable
        point -> dim x dim nested list of ring elements.
    casimirs : tuple of Expr
        Known Casimir functions (may be empty).
    matrix : ndarray or None
        Defining matrix for parametrized families (log-canonical A).
    """

    name: str
    dim: int
    coords: tuple
    tensor: Callable
    casimirs: tuple = ()
    matrix: Optional[np.ndarray] = None

    def parse_hamiltonian(self, text):
        return parse(text, self.coords)

    def __repr__(self):
        return f"PoissonStructure({self.name}, dim={self.dim})"


def bracket(struct, f, g, point):
    """{f, g} at a point; f, g are expressions in struct.coords."""
    lifted = dual_lift(tuple(point))
    fv = evaluate(f, lifted)
    gv = evaluate(g, lifted)
    pi = struct.tensor(tuple(point))
    n = struct.dim
    acc = None
    for i in range(n):
        for j in range(n):
            term = fv.g[i] * pi[i][j] * gv.g[j]
            acc = term if acc is None else acc + term
    return acc


def ham_vector_field(struct, h, point):
    """pi(x) grad h as a tuple of ring elements."""
    pt = tuple(point)
    lifted = dual_lift(pt)
    hv = evaluate(h, lifted)
    pi = struct.tensor(pt)
    n = struct.dim
    out = []
    for i in range(n):
        acc = zero_like(pt[i])
        for j in range(n):
            acc = acc + pi[i][j] * hv.g[j]
        out.append(acc)
    return tuple(out)


def ham_field_float(struct, h):
    """Float-specialized field closure for ODE work."""

    def fn(x):
        return np.array(ham_vector_field(struct, h, tuple(x)), dtype=float)

    return fn


def antisymmetry_residual(struct, point):
    pi = struct.tensor(tuple(point))
    n = struct.dim
    worst = 0.0
    for i in range(n):
        for j in range(n):
            worst = max(worst, abs(real_part(pi[i][j]) + real_part(pi[j][i])))
    return worst


def jacobi_residual(struct, point):
    """Max over index triples of the cyclic Jacobi combination.

    Uses sum_l (pi_il d_l pi_jk + pi_jl d_l pi_ki + pi_kl d_l pi_ij),
    evaluated with dual-number derivatives of the tensor.
    """
    n = struct.dim
    if n < 3:
        return 0.0
    lifted = dual_lift(tuple(point))
    pid = struct.tensor(lifted)

    def partial(entry, l):
        return float(real_part(entry.g[l])) if isinstance(entry, Dual) else 0.0

    val = [[real_part(pid[i][j]) for j in range(n)] for i in range(n)]
    grad = [
        [[partial(pid[i][j], l) for l in range(n)] for j in range(n)]
        for i in range(n)
    ]
    worst = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                s = 0.0
                for l in range(n):
                    s += (
                        val[i][l] * grad[j][k][l]
                        + val[j][l] * grad[k][i][l]
                        + val[k][l] * grad[i][j][l]
                    )
                worst = max(worst, abs(s))
    return worst


def _coord_names(n):
    return tuple(f"x{i + 1}" for i in range(n))


def canonical(n):
    """Canonical structure on R^n = R^d x R^d, n even.

    Coordinates are (q, p) for n = 2 and (q1..qd, p1..pd) otherwise;
    {q_i, p_j} = delta_ij.
    """
    if n % 2 != 0 or n <= 0:
        raise UsageError(f"canonical structure needs positive even dim, got {n}")
    d = n // 2
    if n == 2:
        coords = ("q", "p")
    else:
        coords = tuple(f"q{i + 1}" for i in range(d)) + tuple(f"p{i + 1}" for i in range(d))

    def tensor(point):
        z = zero_like(point[0])
        one = z + 1.0
        rows = []
        for i in range(n):
            row = [z] * n
            if i < d:
                row[i + d] = one
            else:
                row[i - d] = -one
            rows.append(row)
        return rows

    return PoissonStructure(f"canonical:{n}", n, coords, tensor)


def _rational_kernel(a):
    """Kernel basis of an integer-like matrix over the rationals."""
    n = a.shape[0]
    m = [[Fraction(float(a[i, j])).limit_denominator(10**9) for j in range(n)] for i in range(n)]
    # Gauss-Jordan to reduced row echelon form
    pivots = []
    row = 0
    for col in range(n):
        sel = None
        for r in range(row, n):
            if m[r][col] != 0:
                sel = r
                break
        if sel is None:
            continue
        m[row], m[sel] = m[sel], m[row]
        inv = 1 / m[row][col]
        m[row] = [x * inv for x in m[row]]
        for r in range(n):
            if r != row and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[row])]
        pivots.append(col)
        row += 1
        if row == n:
            break
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * n
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -m[r][fc]
        lcm = 1
        for x in v:
            lcm = lcm * x.denominator // gcd(lcm, x.denominator)
        ints = [int(x * lcm) for x in v]
        g = 0
        for x in ints:
            g = gcd(g, abs(x))
        if g > 1:
            ints = [x // g for x in ints]
        basis.append(ints)
    return basis


def log_canonical(a):
    """Log-canonical structure pi_ij = -a_ij x_i x_j for antisymmetric a.

    Casimirs are the monomials prod x_i^(v_i) over integer kernel vectors
    v of a.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise UsageError("log_canonical needs a square matrix")
    n = a.shape[0]
    if float(np.max(np.abs(a + a.T))) > 1e-12:
        raise UsageError("log_canonical matrix must be antisymmetric (tol 1e-12)")
    coords = _coord_names(n)

    def tensor(point, _a=a, _n=n):
        rows = []
        for i in range(_n):
            row = []
            for j in range(_n):
                row.append((-_a[i, j]) * (point[i] * point[j]))
            rows.append(row)
        return rows

    casimirs = []
    for vec in _rational_kernel(a):
        parts = [
            f"{coords[i]}^{e}" if e != 1 else coords[i]
            for i, e in enumerate(vec)
            if e != 0
        ]
        if parts:
            casimirs.append(parse("*".join(parts), coords))
    return PoissonStructure("log_canonical", n, coords, tensor, tuple(casimirs), a)


def so3_dual():
    """Lie-Poisson structure on the dual of so(3): pi(x) = -hat(x)."""
    coords = _coord_names(3)

    def tensor(point):
        x1, x2, x3 = point
        z = zero_like(x1)
        return [
            [z, x3, -x2],
            [-x3, z, x1],
            [x2, -x1, z],
        ]

    cas = (parse("x1^2+x2^2+x3^2", coords),)
    return PoissonStructure("so3_dual", 3, coords, tensor, cas)


def counterexample_2d():
    """Nondegenerate 2d structure with pi_12 = -(x^2 + y^2)."""
    coords = ("x", "y")

    def tensor(point):
        x, y = point
        r2 = x * x + y * y
        z = zero_like(x)
        return [[z, -r2], [r2, z]]

    return PoissonStructure("counterexample_2d", 2, coords, tensor)


def from_id(text, matrix=None):
    """Structure from a harness id: canonical:<n>, log_canonical,
    so3_dual, counterexample_2d."""
    if text.startswith("canonical:"):
        return canonical(int(text.split(":", 1)[1]))
    if text == "log_canonical":
        if matrix is None:
            raise UsageError("log_canonical needs a matrix")
        return log_canonical(matrix)
    if text == "so3_dual":
        return so3_dual()
    if text == "counterexample_2d":
        return counterexample_2d()
    raise UsageError(f"unknown structure id {text!r}")


def casimir_values(struct, x):
    """Evaluate every Casimir at a float point."""
    return np.array([float(evaluate(c, tuple(x))) for c in struct.casimirs])


def conserves_hamiltonian_residual(struct, h, point):
    """|{H, H}| at a point, a cheap self-consistency diagnostic."""
    return abs(real_part(bracket(struct, h, h, point)))
