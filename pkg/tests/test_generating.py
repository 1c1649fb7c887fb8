"""Generating-function recursion against closed-form coefficient oracles."""

import math

import numpy as np
import pytest

from poissonint.birealisations import (
    BiRealisation,
    canonical_symplectic,
    log_canonical_bireal,
    so3_dual_cayley,
)
from poissonint.errors import NewtonDiverged, UsageError
from poissonint.expressions import evaluate, parse
from poissonint.generating import (
    eval_S,
    grad_S,
    hj_coefficients,
    hj_residual,
    solve_source,
    variation_function,
    variation_jet,
)
from poissonint.poisson import canonical, log_canonical, so3_dual
from poissonint.rings import dual_lift, real_part

from helpers import fd_gradient, fit_slope

LV3 = np.array([[0.0, 1.0, 1.0], [-1.0, 0.0, 1.0], [-1.0, -1.0, 0.0]])

H_TEXTS_3 = [
    "x1+x2+x3",
    "x1*x2 + x3^2",
    "x1^2*x3 - x2",
    "exp(0.2*x1) + x2*x3",
    "(x1^2 + 2.0*x2^2 + x3^2)/2.0 + 0.3*x1*x3",
]


def _grad_hess(h, x):
    lifted2 = dual_lift(dual_lift(tuple(x)))
    v = evaluate(h, lifted2)
    n = len(x)
    g = np.array([real_part(v.g[i]) for i in range(n)])
    hess = np.array([[real_part(v.g[i].g[j]) for j in range(n)] for i in range(n)])
    return g, hess


def _charts_with_h():
    out = []
    c2 = canonical(2)
    for text in ["(q^2+p^2)/2.0", "p^2/2.0 + q^4/4.0", "exp(0.3*q)*p + q^2"]:
        out.append((canonical_symplectic(2), c2, c2.parse_hamiltonian(text)))
    lv = log_canonical(LV3)
    for text in H_TEXTS_3[:3]:
        out.append((log_canonical_bireal(LV3), lv, lv.parse_hamiltonian(text)))
    so3 = so3_dual()
    for text in ["(x1^2/1.0 + x2^2/2.0 + x3^2/3.0)/2.0", "x1*x2 + x3"]:
        out.append((so3_dual_cayley(), so3, so3.parse_hamiltonian(text)))
    return out


def test_s1_is_the_hamiltonian():
    rng = np.random.default_rng(20)
    for chart, struct, h in _charts_with_h():
        gf = hj_coefficients(h, chart, 3)
        for _ in range(10):
            x = 0.4 + rng.random(struct.dim)
            assert abs(gf.S[0](tuple(x)) - evaluate(h, tuple(x))) < 1e-12


def test_s2_vanishes_for_builtin_charts():
    # all built-in charts satisfy beta(x, p) = alpha(x, -p); the exact
    # generating function is odd in t, so every even coefficient is zero
    rng = np.random.default_rng(21)
    for chart, struct, h in _charts_with_h():
        gf = hj_coefficients(h, chart, 4)
        for _ in range(20):
            x = 0.4 + rng.random(struct.dim)
            assert abs(gf.S[1](tuple(x))) < 1e-13, chart.name
            assert abs(gf.S[3](tuple(x))) < 1e-12, chart.name


def test_s3_canonical_closed_form():
    # S3 = (1/6) (L g)^T Hess (L g) with L the covector block of alpha
    rng = np.random.default_rng(22)
    c2 = canonical(2)
    chart = canonical_symplectic(2)
    for text in ["(q^2+p^2)/2.0", "p^2/2.0 + q^4/4.0", "exp(0.3*q)*p + q^2"]:
        h = c2.parse_hamiltonian(text)
        gf = hj_coefficients(h, chart, 3)
        L = np.array([[0.0, -0.5], [0.5, 0.0]])
        for _ in range(10):
            x = 0.4 + rng.random(2)
            g, hess = _grad_hess(h, x)
            lg = L @ g
            expect = lg @ hess @ lg / 6.0
            assert abs(gf.S[2](tuple(x)) - expect) < 1e-11


def test_s3_log_canonical_closed_form():
    # delta(t) = x_j(exp(t w_j) - 1) with w = (1/2) A (x o g), so
    # S3 = (1/3)[ (1/2) sum_j g_j x_j w_j^2 + (1/2) (x o w)^T Hess (x o w) ]
    rng = np.random.default_rng(23)
    lv = log_canonical(LV3)
    chart = log_canonical_bireal(LV3)
    for text in H_TEXTS_3:
        h = lv.parse_hamiltonian(text)
        gf = hj_coefficients(h, chart, 3)
        for _ in range(10):
            x = 0.4 + rng.random(3)
            g, hess = _grad_hess(h, x)
            w = 0.5 * (LV3 @ (x * g))
            xw = x * w
            expect = (0.5 * np.sum(g * x * w * w) + 0.5 * xw @ hess @ xw) / 3.0
            assert abs(gf.S[2](tuple(x)) - expect) < 1e-11


def test_s3_so3_closed_form():
    # delta(t) = -(t/2) g x x + (t^2/4)(g.x) g gives
    # S3 = (1/3)[ (g.x)|g|^2/4 + (1/8)(g x x)^T Hess (g x x) ]
    rng = np.random.default_rng(24)
    so3 = so3_dual()
    chart = so3_dual_cayley()
    for text in ["(x1^2/1.0 + x2^2/2.0 + x3^2/3.0)/2.0", "x1*x2 + x3"]:
        h = so3.parse_hamiltonian(text)
        gf = hj_coefficients(h, chart, 3)
        for _ in range(10):
            x = 0.4 + rng.random(3)
            g, hess = _grad_hess(h, x)
            cr = np.cross(g, x)
            expect = (np.dot(g, x) * np.dot(g, g) / 4.0 + cr @ hess @ cr / 8.0) / 3.0
            assert abs(gf.S[2](tuple(x)) - expect) < 1e-11


def test_s2_s3_on_asymmetric_chart():
    # chart without the p -> -p symmetry pins the recursion normalization:
    # alpha = (x1 + p1 + c p1^2, x2 + p2) gives S2 = |g|^2/2 and
    # S3 = g^T Hess g / 2 + (c/3) g1^3
    c = 0.7

    def alpha(x, p):
        return (x[0] + p[0] + c * (p[0] * p[0]), x[1] + p[1])

    def beta(x, p):
        return (x[0] - p[0] + c * (p[0] * p[0]), x[1] - p[1])

    chart = BiRealisation("asym-test", 2, alpha, beta)
    coords = ("x1", "x2")
    rng = np.random.default_rng(25)
    for text in ["x1^2 + x1*x2", "exp(0.2*x1) + x2^2", "x1^3/3.0 + x2"]:
        h = parse(text, coords)
        gf = hj_coefficients(h, chart, 3)
        for _ in range(10):
            x = 0.4 + rng.random(2)
            g, hess = _grad_hess(h, x)
            s2_expect = 0.5 * np.dot(g, g)
            s3_expect = 0.5 * (g @ hess @ g) + (c / 3.0) * g[0] ** 3
            assert abs(gf.S[1](tuple(x)) - s2_expect) < 1e-11
            assert abs(gf.S[2](tuple(x)) - s3_expect) < 1e-11


def test_eval_s_frozen_value():
    # k=2, chain matrix, H = x1 + x2, m = (1,1), t = 0.1: S2 vanishes
    # identically, so S_t = 0.1 * 2 = 0.2
    a = np.array([[0.0, 1.0], [-1.0, 0.0]])
    lv = log_canonical(a)
    gf = hj_coefficients(lv.parse_hamiltonian("x1+x2"), log_canonical_bireal(a), 2)
    assert abs(eval_S(gf, 0.1, (1.0, 1.0)) - 0.2) < 1e-14


def test_grad_s_matches_fd():
    rng = np.random.default_rng(26)
    for chart, struct, h in _charts_with_h()[:6]:
        gf = hj_coefficients(h, chart, 3)
        t = 0.13
        x = 0.5 + rng.random(struct.dim)

        def s_of(m):
            return eval_S(gf, t, tuple(m))

        fd = fd_gradient(s_of, x)
        assert np.max(np.abs(grad_S(gf, t, tuple(x)) - fd)) < 1e-5


def test_variation_function_midpoint_family():
    # hj:1 on the canonical chart is the midpoint map; its modified
    # Hamiltonian is H/(1 + t^2/4) for the harmonic oscillator
    c2 = canonical(2)
    h = c2.parse_hamiltonian("(q^2+p^2)/2.0")
    gf = hj_coefficients(h, canonical_symplectic(2), 1)
    rng = np.random.default_rng(27)
    for _ in range(10):
        x = rng.standard_normal(2)
        hval = 0.5 * float(x @ x)
        for t in (0.05, 0.1, 0.3, 0.7):
            assert abs(variation_function(gf, t, x) - hval / (1 + t * t / 4)) < 1e-8


def test_variation_jet_matches_variation_function():
    lv = log_canonical(LV3)
    h = lv.parse_hamiltonian("x1+x2+x3")
    gf = hj_coefficients(h, log_canonical_bireal(LV3), 2)
    x = np.array([0.9, 1.1, 0.7])
    vj = variation_jet(gf, tuple(x), 3)

    def hfun(t):
        if t == 0.0:
            return float(evaluate(h, tuple(x)))
        return variation_function(gf, t, x)

    assert abs(real_part(vj.c[0]) - hfun(0.0)) < 1e-12
    eps = 1e-3
    d1 = (hfun(eps) - hfun(-eps)) / (2 * eps)
    d2 = (hfun(eps) - 2 * hfun(0.0) + hfun(-eps)) / eps**2
    assert abs(real_part(vj.c[1]) - d1) < 1e-6
    assert abs(2 * real_part(vj.c[2]) - d2) < 1e-5


def test_hj_residual_slopes():
    c2 = canonical(2)
    h = c2.parse_hamiltonian("p^2/2.0 + q^4/4.0")
    chart = canonical_symplectic(2)
    x = (0.8, 0.4)
    ts = np.array([0.1, 0.05, 0.025, 0.0125])
    # odd k: next even coefficient vanishes, so the slope is k+1
    for k, lo, hi in ((1, 1.75, 2.3), (2, 1.8, 2.2), (3, 3.75, 4.3)):
        gf = hj_coefficients(h, chart, k)
        errs = [hj_residual(gf, t, x) for t in ts]
        slope = fit_slope(ts, errs)
        assert lo <= slope <= hi, (k, slope)
        assert slope >= k - 0.25


def test_solve_source_residual_and_report():
    lv = log_canonical(LV3)
    h = lv.parse_hamiltonian("x1+x2+x3")
    gf = hj_coefficients(h, log_canonical_bireal(LV3), 2)
    x = np.array([1.2, 0.8, 1.0])
    y, report = solve_source(gf, 0.1, x, tol=1e-13)
    p = grad_S(gf, 0.1, tuple(y))
    back = np.array(
        [real_part(v) for v in gf.bireal.alpha(tuple(y), tuple(p))]
    )
    assert np.max(np.abs(back - x)) < 1e-12
    assert report.iterations <= 10
    assert report.residual <= 1e-13


def test_solve_source_domain_guard():
    so3 = so3_dual()
    h = so3.parse_hamiltonian("x1^2+x2^2+x3^2")
    gf = hj_coefficients(h, so3_dual_cayley(), 1)
    with pytest.raises(NewtonDiverged):
        solve_source(gf, 1.0, np.array([1.0, 1.0, 1.0]))


def test_unit_law_guard():
    def bad_alpha(x, p):
        return (x[0] + 0.1, x[1])

    def bad_beta(x, p):
        return x

    chart = BiRealisation("bad", 2, bad_alpha, bad_beta)
    h = parse("x1+x2", ("x1", "x2"))
    with pytest.raises(UsageError):
        hj_coefficients(h, chart, 2)
    with pytest.raises(UsageError):
        hj_coefficients(h, canonical_symplectic(2), 0)
