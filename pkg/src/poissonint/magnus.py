"""Magnus truncation of time-dependent Hamiltonians.

A one-step map whose variation function is h_t is, through order k, the
time-1 flow of a single modified Hamiltonian Omega(eps) = sum eps^i Omega_i.
The coefficients solve the formal equation

    d/d(eps) Omega = sum_i (B_i / i!) ad_Omega^i h_eps,

where ad is the Poisson bracket of the ambient structure and B_i is the
Bernoulli number with B_1 = -1/2.  That convention pairs with the flow
x' = pi grad(h) and the bracket built from the same pi; the combination
is what the order-(k+1) flow agreement test pins down.  Integration is
exact on polynomial coefficients in eps: no quadrature enters the shipped
path.  Coefficient fields are closures evaluated with dual numbers, so
nested brackets never build symbolic expressions.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Callable

import numpy as np

from .errors import NumericalFailure, UsageError
from .generating import variation_jet
from .rings import Dual, TJet, dual_lift, real_part, zero_like

__all__ = [
    "TimeDepHamiltonian",
    "MagnusSeries",
    "bernoulli",
    "magnus_truncate",
    "magnus_flow_check",
]

_BERNOULLI_MAX = 16


def _bernoulli_row(upto):
    # recurrence sum_{j=0}^{m} C(m+1, j) B_j = 0 with B_0 = 1
    out = [Fraction(1)]
    for m in range(1, upto + 1):
        s = Fraction(0)
        for j in range(m):
            s += comb(m + 1, j) * out[j]
        out.append(-s / (m + 1))
    return tuple(out)


_BERNOULLI = _bernoulli_row(_BERNOULLI_MAX)


def bernoulli(i):
    """Bernoulli number B_i, first-kind convention (B_1 = -1/2).

    Parameters
    ----------
    i : int
        Index, 0 <= i <= 16.

    Returns
    -------
    Fraction
        Exact rational value.
    """
    if not isinstance(i, int) or isinstance(i, bool):
        raise UsageError(f"bernoulli index must be an int, got {i!r}")
    if not 0 <= i <= _BERNOULLI_MAX:
        raise UsageError(f"bernoulli index must be in [0, {_BERNOULLI_MAX}], got {i}")
    return _BERNOULLI[i]


@dataclass
class TimeDepHamiltonian:
    """t-expansion of a time-dependent Hamiltonian at t = 0.

    Attributes
    ----------
    jet_fn : callable
        point -> TJet whose coefficient j is (1/j!) d^j h/dt^j |_{t=0},
        coefficients in the point's scalar ring.
    order : int
        Highest stored t-power.
    """

    jet_fn: Callable
    order: int

    def __call__(self, point):
        return self.jet_fn(tuple(point))

    def coefficient(self, j):
        """Scalar field for the t^j coefficient."""
        if not 0 <= j <= self.order:
            raise UsageError(f"coefficient {j} outside jet order {self.order}")

        def field(point, _j=j):
            return self.jet_fn(tuple(point)).c[_j]

        return field

    @classmethod
    def from_time_function(cls, h, order):
        """Expand h(t, point), analytic in t, around t = 0.

        ``h`` must be generic over the scalar ring in both slots; the t
        slot is fed a jet variable, so only ring operations may touch it.
        """
        if order < 1:
            raise UsageError(f"jet order must be >= 1, got {order}")

        def jet_fn(point):
            t = TJet.variable(0.0, order)
            val = h(t, tuple(point))
            if not isinstance(val, TJet):
                val = TJet.constant(val, order)
            return val

        return cls(jet_fn, order)

    @classmethod
    def constant(cls, field, order):
        """Time-independent h_t = field."""

        def jet_fn(point):
            v = field(tuple(point))
            return TJet.constant(v, order)

        return cls(jet_fn, max(order, 0))

    @classmethod
    def from_variation(cls, gf, order):
        """Variation function of an hj scheme as a time jet."""

        def jet_fn(point):
            return variation_jet(gf, tuple(point), order)

        return cls(jet_fn, order)


@dataclass
class MagnusSeries:
    """Modified-Hamiltonian coefficients Omega_1..Omega_k.

    Attributes
    ----------
    coeffs : tuple of callables
        coeffs[i] is the field Omega_{i+1} (coefficient of eps^{i+1}),
        evaluable on any scalar-ring point.
    """

    coeffs: tuple

    @property
    def k(self):
        return len(self.coeffs)

    def evaluate(self, point):
        """All coefficients at a float point, as an ndarray."""
        pt = tuple(point)
        return np.array([real_part(f(pt)) for f in self.coeffs])

    def modified_field(self, eps):
        """The single field sum_i eps^i Omega_i."""

        def field(point):
            pt = tuple(point)
            acc = None
            scale = eps
            for f in self.coeffs:
                term = f(pt) * scale
                acc = term if acc is None else acc + term
                scale = scale * eps
            return acc

        return field


def _bracket_fields(struct, f, g):
    """Field {f, g} via one extra dual layer; pi is read at the raw point."""

    def value(point):
        pt = tuple(point)
        lifted = dual_lift(pt)
        fv = f(lifted)
        gv = g(lifted)
        if not isinstance(fv, Dual) or not isinstance(gv, Dual):
            return 0.0
        pi = struct.tensor(pt)
        n = struct.dim
        acc = None
        for i in range(n):
            for j in range(n):
                term = fv.g[i] * pi[i][j] * gv.g[j]
                acc = term if acc is None else acc + term
        return acc

    return value


def _scaled_sum(parts, scale):
    """Field sum of (coefficient, field) pairs, times a final scale."""

    def value(point):
        pt = tuple(point)
        acc = None
        for c, f in parts:
            term = f(pt) * c
            acc = term if acc is None else acc + term
        return zero_like(pt[0]) if acc is None else acc * scale

    return value


def _ad_tuples(budget, count):
    """Ordered tuples of `count` integers >= 1 with sum <= budget."""
    if count == 0:
        yield ()
        return
    for first in range(1, budget - count + 2):
        for rest in _ad_tuples(budget - first, count - 1):
            yield (first,) + rest


def magnus_truncate(h, struct, k):
    """Coefficient fields Omega_1..Omega_k of the modified Hamiltonian.

    Parameters
    ----------
    h : TimeDepHamiltonian
        Needs jet order >= k - 1.
    struct : PoissonStructure
        Supplies the bracket for the ad-powers.
    k : int
        Truncation order, 1 <= k <= 6.

    Returns
    -------
    MagnusSeries
    """
    if not 1 <= k <= 6:
        raise UsageError(f"magnus order must be in [1, 6], got {k}")
    if h.order < k - 1:
        raise UsageError(f"jet order {h.order} too low for magnus order {k}")
    hf = [h.coefficient(j) for j in range(k)]
    weights = [float(bernoulli(i) / factorial(i)) for i in range(k)]
    omegas = []
    for m in range(k):
        parts = [(1.0, hf[m])]
        for i in range(1, m + 1):
            if weights[i] == 0.0:
                continue
            for ms in _ad_tuples(m, i):
                j = m - sum(ms)
                chain = hf[j]
                for ml in reversed(ms):
                    chain = _bracket_fields(struct, omegas[ml - 1], chain)
                parts.append((weights[i], chain))
        omegas.append(_scaled_sum(parts, 1.0 / (m + 1)))
    return MagnusSeries(tuple(omegas))


def _tensor_matrix(struct, x):
    pi = struct.tensor(tuple(x))
    n = struct.dim
    return np.array([[real_part(pi[i][j]) for j in range(n)] for i in range(n)])


def _field_velocity(struct, value, x):
    """pi(x) grad(value) for a ring value over the lift of x."""
    if not isinstance(value, Dual):
        return np.zeros(len(x))
    grad = np.array([real_part(g) for g in value.g])
    return _tensor_matrix(struct, x) @ grad


def _reference_flow(rhs, horizon, x):
    from scipy.integrate import solve_ivp

    sol = solve_ivp(
        rhs, (0.0, horizon), np.asarray(x, dtype=float),
        method="DOP853", rtol=1e-12, atol=1e-14,
    )
    if not sol.success:
        raise NumericalFailure(f"reference flow failed: {sol.message}")
    return sol.y[:, -1]


def magnus_flow_check(h, struct, k, x, eps):
    """Compare the time-eps flow of h_t with the time-1 flow of Omega.

    Both flows run on a high-accuracy reference solver; the returned
    points differ by O(eps^{k+1}) when the truncation is consistent.

    Parameters
    ----------
    h : TimeDepHamiltonian
        Needs jet order >= k so the flow of the jet itself carries no
        error below the comparison order.
    struct : PoissonStructure
    k : int
    x : array_like
        Initial point.
    eps : float
        Flow time; 0 returns (x, x) exactly.

    Returns
    -------
    (ndarray, ndarray)
        Endpoint of the h_t flow and of the modified-field flow.
    """
    if h.order < k:
        raise UsageError(f"flow check needs jet order >= {k}, got {h.order}")
    x = np.asarray(x, dtype=float)
    if eps == 0.0:
        return x.copy(), x.copy()
    series = magnus_truncate(h, struct, k)
    mod = series.modified_field(eps)

    def rhs_time(t, y):
        lifted = dual_lift(tuple(y))
        jet = h.jet_fn(lifted)
        val = jet.c[-1]
        for c in reversed(jet.c[:-1]):
            val = val * t + c
        return _field_velocity(struct, val, y)

    def rhs_mod(_t, y):
        lifted = dual_lift(tuple(y))
        return _field_velocity(struct, mod(lifted), y)

    a = _reference_flow(rhs_time, eps, x)
    b = _reference_flow(rhs_mod, 1.0, x)
    return a, b
