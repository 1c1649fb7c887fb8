"""Bi-realisation chart tests: unit law, Poisson/anti-Poisson property,
pinned values, Cayley rotation oracle, Jacobians."""

import math

import numpy as np
import pytest

from poissonint.birealisations import (
    alpha_jacobian,
    bireal_for,
    canonical_symplectic,
    log_canonical_bireal,
    so3_dual_cayley,
    unit_law_residual,
)
from poissonint.errors import UsageError
from poissonint.poisson import canonical, counterexample_2d, log_canonical, so3_dual
from poissonint.rings import dual_lift, real_part

from helpers import fd_jacobian

LV3 = np.array([[0.0, 1.0, 1.0], [-1.0, 0.0, 1.0], [-1.0, -1.0, 0.0]])


def _charts():
    return [
        (canonical_symplectic(2), canonical(2)),
        (canonical_symplectic(4), canonical(4)),
        (log_canonical_bireal(LV3), log_canonical(LV3)),
        (so3_dual_cayley(), so3_dual()),
    ]


def test_unit_law_many_points():
    rng = np.random.default_rng(10)
    for chart, _ in _charts():
        for _ in range(250):
            x = 0.25 + rng.random(chart.dim)
            assert unit_law_residual(chart, x) < 1e-14, chart.name


def test_beta_is_alpha_of_negated_covector():
    rng = np.random.default_rng(11)
    for chart, _ in _charts():
        for _ in range(50):
            x = 0.25 + rng.random(chart.dim)
            p = 0.3 * rng.standard_normal(chart.dim)
            a = chart.alpha(tuple(x), tuple(-p))
            b = chart.beta(tuple(x), tuple(p))
            for u, v in zip(a, b):
                assert abs(real_part(u) - real_part(v)) < 1e-14


def test_canonical_chart_pinned():
    chart = canonical_symplectic(2)
    a = chart.alpha((1.0, 2.0), (0.4, 0.6))
    assert a == (1.0 - 0.3, 2.0 + 0.2)
    b = chart.beta((1.0, 2.0), (0.4, 0.6))
    assert b == (1.0 + 0.3, 2.0 - 0.2)


def test_log_canonical_chart_pinned():
    chart = log_canonical_bireal(np.array([[0.0, 1.0], [-1.0, 0.0]]))
    a = chart.alpha((1.0, 1.0), (0.2, 0.0))
    b = chart.beta((1.0, 1.0), (0.2, 0.0))
    assert abs(a[0] - 1.0) < 1e-15
    assert abs(a[1] - math.exp(-0.1)) < 1e-15
    assert abs(b[0] - 1.0) < 1e-15
    assert abs(b[1] - math.exp(0.1)) < 1e-15


def _random_quadratic(rng, n):
    c = 0.5 * rng.standard_normal((n, n))
    c = c + c.T
    b = rng.standard_normal(n)

    def f(y):
        acc = None
        for i in range(n):
            t = b[i] * y[i]
            acc = t if acc is None else acc + t
            for j in range(n):
                acc = acc + (0.5 * c[i, j]) * (y[i] * y[j])
        return acc

    return f


def _canonical_cotangent_bracket(fu, gu, n):
    # {u, v} = sum_i du/dx_i dv/dp_i - du/dp_i dv/dx_i on 2n coordinates
    s = 0.0
    for i in range(n):
        s += real_part(fu.g[i]) * real_part(gu.g[n + i])
        s -= real_part(fu.g[n + i]) * real_part(gu.g[i])
    return s


def _base_bracket(struct, f, g, x):
    lifted = dual_lift(tuple(x))
    fv = f(lifted)
    gv = g(lifted)
    pi = struct.tensor(tuple(x))
    s = 0.0
    n = struct.dim
    for i in range(n):
        for j in range(n):
            s += real_part(fv.g[i]) * real_part(pi[i][j]) * real_part(gv.g[j])
    return s


@pytest.mark.parametrize("which", ["alpha", "beta"])
def test_poisson_property_of_charts(which):
    # alpha is Poisson, beta anti-Poisson, for the cotangent bracket
    rng = np.random.default_rng(12)
    sign = 1.0 if which == "alpha" else -1.0
    for chart, struct in _charts():
        n = chart.dim
        for _ in range(12):
            f = _random_quadratic(rng, n)
            g = _random_quadratic(rng, n)
            x = 0.25 + rng.random(n)
            p = rng.standard_normal(n)
            p *= 0.3 / max(1.0, np.linalg.norm(p))
            z = dual_lift(tuple(x) + tuple(p))
            out = getattr(chart, which)(z[:n], z[n:])
            fu = f(out)
            gu = g(out)
            lhs = _canonical_cotangent_bracket(fu, gu, n)
            base_pt = np.array([real_part(o) for o in out])
            rhs = sign * _base_bracket(struct, f, g, base_pt)
            assert abs(lhs - rhs) < 1e-6, (chart.name, which)


def _cayley_rotation(w):
    # rotation about w/|w| by angle 2*atan(|w|/2), Rodrigues form
    nw = np.linalg.norm(w)
    if nw == 0:
        return np.eye(3)
    u = w / nw
    theta = 2.0 * math.atan(nw / 2.0)
    k = np.array([[0, -u[2], u[1]], [u[2], 0, -u[0]], [-u[1], u[0], 0]])
    return np.eye(3) + math.sin(theta) * k + (1 - math.cos(theta)) * (k @ k)


def test_so3_beta_is_cayley_rotation_of_alpha():
    chart = so3_dual_cayley()
    rng = np.random.default_rng(13)
    for _ in range(100):
        x = rng.standard_normal(3)
        w = rng.standard_normal(3)
        w *= rng.uniform(0.0, 1.8) / max(1e-12, np.linalg.norm(w))
        a = np.array(chart.alpha(tuple(x), tuple(w)), dtype=float)
        b = np.array(chart.beta(tuple(x), tuple(w)), dtype=float)
        rb = _cayley_rotation(w) @ a
        assert np.max(np.abs(b - rb)) < 1e-10
        assert abs(np.linalg.norm(a) - np.linalg.norm(b)) < 1e-10


def test_alpha_jacobian_matches_fd():
    rng = np.random.default_rng(14)
    for chart, _ in _charts():
        n = chart.dim
        x = 0.5 + rng.random(n)
        p = 0.2 * rng.standard_normal(n)

        def amap(z):
            return np.array(
                [real_part(v) for v in chart.alpha(tuple(z[:n]), tuple(z[n:]))]
            )

        jac = alpha_jacobian(chart, x, p)
        assert jac.shape == (n, 2 * n)
        fd = fd_jacobian(amap, np.concatenate([x, p]), h=1e-6)
        assert np.max(np.abs(jac - fd)) < 1e-5, chart.name


def test_canonical_jacobian_constant_blocks():
    chart = canonical_symplectic(2)
    jac = alpha_jacobian(chart, (0.3, -0.7), (0.1, 0.5))
    expect = np.array([[1.0, 0.0, 0.0, -0.5], [0.0, 1.0, 0.5, 0.0]])
    assert np.max(np.abs(jac - expect)) == 0.0


def test_chart_validation_errors():
    with pytest.raises(UsageError):
        canonical_symplectic(3)
    with pytest.raises(UsageError):
        log_canonical_bireal(np.array([[0.0, 1.0], [-0.9, 0.0]]))
    with pytest.raises(UsageError):
        bireal_for(counterexample_2d())


def test_bireal_for_builtins():
    assert bireal_for(canonical(4)).dim == 4
    assert bireal_for(log_canonical(LV3)).name == "log_canonical_bireal"
    assert bireal_for(so3_dual()).domain_hint == 1.9
