"""Acceptance gate: ten end-to-end checks, one test function per
criterion, each at its stated tolerance.  Run with -v to get one
pass/fail line apiece.  Every check is independent of the others and
uses its own seeded generator."""

import math

import numpy as np
import pytest

from poissonint.birealisations import (
    bireal_for,
    canonical_symplectic,
    log_canonical_bireal,
    so3_dual_cayley,
    unit_law_residual,
)
from poissonint.expressions import evaluate
from poissonint.generating import hj_coefficients
from poissonint.harness import RunConfig, drift_report, order_study, run
from poissonint.integrators import (
    StepConfig,
    counterexample_step,
    exact_flow,
    hj_step,
    make_hj_step,
)
from poissonint.magnus import TimeDepHamiltonian, magnus_truncate
from poissonint.poisson import (
    canonical,
    counterexample_2d,
    jacobi_residual,
    log_canonical,
    so3_dual,
)
from poissonint.rings import dual_lift, real_part

from helpers import fd_gradient, fd_jacobian

CHAIN2 = np.array([[0.0, 1.0], [-1.0, 0.0]])
CHAIN3 = np.array([[0.0, 1.0, 1.0], [-1.0, 0.0, 1.0], [-1.0, -1.0, 0.0]])
CYCLIC3 = np.array([[0.0, 1.0, -1.0], [-1.0, 0.0, 1.0], [1.0, -1.0, 0.0]])

SO3_H = "(x1^2/1 + x2^2/2 + x3^2/3)/2"


def test_01_midpoint_equivalence():
    # hj:1 on the canonical chart equals the implicit midpoint map; for
    # the harmonic oscillator that map is the Cayley transform of dt*J
    struct = canonical(2)
    h = struct.parse_hamiltonian("(q^2 + p^2)/2")
    gf = hj_coefficients(h, canonical_symplectic(2), 1)
    dt = 0.1
    j = np.array([[0.0, 1.0], [-1.0, 0.0]])
    m = np.linalg.solve(np.eye(2) - 0.5 * dt * j, np.eye(2) + 0.5 * dt * j)
    rng = np.random.default_rng(101)
    worst = 0.0
    for _ in range(100):
        x = rng.standard_normal(2)
        out, _ = hj_step(gf, StepConfig(dt), x)
        worst = max(worst, float(np.max(np.abs(out - m @ x))))
    assert worst < 1e-10, f"worst deviation {worst:.3e}"


def _random_polynomial_text(rng, coords):
    monomials = list(coords)
    n = len(coords)
    for i in range(n):
        for j in range(i, n):
            monomials.append(f"{coords[i]}*{coords[j]}")
    coeffs = rng.uniform(-1.0, 1.0, size=len(monomials))
    return " + ".join(f"({float(c)!r})*{m}" for c, m in zip(coeffs, monomials))


def test_02_s2_closed_form_log_canonical():
    # second generating coefficient against -1/2 sum a_ij x_i x_j dH_i dH_j;
    # antisymmetry of a makes both sides vanish, and they must agree
    a = CHAIN3
    struct = log_canonical(a)
    chart = log_canonical_bireal(a)
    rng = np.random.default_rng(102)
    worst = 0.0
    for _ in range(5):
        h = struct.parse_hamiltonian(_random_polynomial_text(rng, struct.coords))
        gf = hj_coefficients(h, chart, 2)
        for _ in range(100):
            x = rng.uniform(0.5, 1.5, size=3)
            s2 = float(gf.S[1](tuple(x)))
            hv = evaluate(h, dual_lift(tuple(x)))
            grads = [real_part(g) for g in hv.g]
            formula = 0.0
            for i in range(3):
                for j in range(3):
                    formula += a[i, j] * x[i] * x[j] * grads[i] * grads[j]
            formula *= -0.5
            worst = max(worst, abs(s2 - formula))
    assert worst < 1e-10, f"worst deviation {worst:.3e}"


def test_03_magnus_collapse_of_variation():
    # the Magnus truncation of an order-k scheme's variation function is
    # (H, 0, ..., 0): the modified Hamiltonian agrees with H through t^k
    cases = [
        (canonical(2), canonical_symplectic(2), "(q^2 + p^2)/2 + q^4/4"),
        (log_canonical(CHAIN3), log_canonical_bireal(CHAIN3), "x1 + x2 + x3"),
    ]
    rng = np.random.default_rng(103)
    worst = 0.0
    for struct, chart, text in cases:
        h = struct.parse_hamiltonian(text)
        for k in (1, 2, 3):
            gf = hj_coefficients(h, chart, k)
            ht = TimeDepHamiltonian.from_variation(gf, k)
            series = magnus_truncate(ht, struct, k)
            for _ in range(5):
                x = rng.uniform(0.6, 1.2, size=struct.dim)
                vals = series.evaluate(tuple(x))
                href = float(evaluate(h, tuple(x)))
                worst = max(worst, abs(vals[0] - href))
                for j in range(1, k):
                    worst = max(worst, abs(vals[j]))
    assert worst < 1e-6, f"worst residual {worst:.3e}"


def test_04_euler_symplectic_epsilon2():
    # h_t(q, p) = K(p) + V(q + t K'(p)) with V = q^4/4, K = p^2/2 has
    # second Magnus coefficient (1/2) V'(q) K'(p) = q^3 p / 2
    struct = canonical(2)

    def h(t, point):
        q, p = point
        shifted = q + t * p
        return 0.5 * p * p + 0.25 * shifted * shifted * shifted * shifted

    ht = TimeDepHamiltonian.from_time_function(h, order=2)
    series = magnus_truncate(ht, struct, 2)
    rng = np.random.default_rng(104)
    worst = 0.0
    for _ in range(100):
        q, p = rng.uniform(-1.5, 1.5, size=2)
        got = float(series.coeffs[1]((q, p)))
        worst = max(worst, abs(got - 0.5 * q**3 * p))
    assert worst < 1e-10, f"worst deviation {worst:.3e}"


def test_05_convergence_orders():
    # measured slopes for hj:k stay above k - 0.2 on a symplectic and a
    # genuinely Poisson example
    dts = (0.1, 0.05, 0.025, 0.0125)
    slopes = {}
    for k in (1, 2, 3):
        cfg = RunConfig(
            name="acc5h",
            structure="canonical:2",
            hamiltonian="(q^2 + p^2)/2",
            scheme=f"hj:{k}",
            dt=0.1,
            steps=1,
            initial=(1.0, 0.0),
        )
        res = order_study(cfg, dts=dts, reference="exact:harmonic", horizon=1.0)
        slopes[("harmonic", k)] = res.slope
        cfg = RunConfig(
            name="acc5lv",
            structure="log_canonical",
            hamiltonian="x1 + x2 + x3",
            scheme=f"hj:{k}",
            dt=0.1,
            steps=1,
            initial=(0.7, 1.3, 1.1),
            matrix=tuple(tuple(row) for row in CHAIN3),
        )
        res = order_study(cfg, dts=dts, reference="rk4", horizon=1.0)
        slopes[("lv3", k)] = res.slope
    for (system, k), slope in slopes.items():
        assert slope >= k - 0.2, f"hj:{k} on {system}: slope {slope:.3f}"


def test_06_casimir_preservation_vs_rk4():
    # 10^4 steps at dt = 0.05: the hj schemes hold every Casimir below
    # 1e-9 drift while RK4 drifts past 1e-5 on the same runs
    cases = [
        dict(
            structure="log_canonical",
            hamiltonian="x1 + x2 + x3",
            scheme="hj:2",
            initial=(2.0, 4.0, 1.0),
            matrix=tuple(tuple(row) for row in CYCLIC3),
        ),
        dict(
            structure="so3_dual",
            hamiltonian=SO3_H,
            scheme="hj:1",
            initial=(2.0, 3.0, 1.0),
        ),
    ]
    for case in cases:
        scheme = case.pop("scheme")
        base = dict(
            name="acc6",
            dt=0.05,
            steps=10_000,
            newton_tol=1e-13,
            **case,
        )
        geo = drift_report(run(RunConfig(scheme=scheme, **base)))
        ref = drift_report(run(RunConfig(scheme="rk4", **base)))
        geo_drift = max(geo.casimir_drifts)
        ref_drift = max(ref.casimir_drifts)
        label = f"{case['structure']} {scheme}"
        assert geo_drift < 1e-9, f"{label}: Casimir drift {geo_drift:.3e}"
        assert ref_drift > 1e-5, f"{label}: rk4 baseline only {ref_drift:.3e}"


def test_07_kahan_h_exactness():
    # the Kahan step conserves the linear Lotka-Volterra Hamiltonian to
    # rounding over 10^4 steps, n = 2 and n = 3
    cases = [
        (CHAIN2, "x1 + x2", (0.6, 1.4)),
        (CHAIN3, "x1 + x2 + x3", (0.7, 1.3, 1.1)),
    ]
    for a, text, x0 in cases:
        cfg = RunConfig(
            name="acc7",
            structure="log_canonical",
            hamiltonian=text,
            scheme="kahan_lv",
            dt=0.12,
            steps=10_000,
            initial=x0,
            matrix=tuple(tuple(row) for row in a),
        )
        report = drift_report(run(cfg))
        assert report.h_drift < 1e-10, f"n={len(x0)}: drift {report.h_drift:.3e}"


def test_08_counterexample_divergence():
    # log-norm grows with slope exactly dt^k, and the iterates leave a
    # 10 ||x0|| ball around the exact flow within ceil(ln(11)/dt^k) steps
    dt = 0.1
    x0 = np.array([1.0, 0.0])
    for k in (1, 2):
        nsteps = math.ceil(math.log(11.0) / dt**k)
        x = x0.copy()
        lognorm = 0.0
        for _ in range(nsteps):
            x = counterexample_step(k, dt, x)
            nxt = math.log(float(np.linalg.norm(x)))
            assert abs((nxt - lognorm) - dt**k) < 1e-12
            lognorm = nxt
        exact = exact_flow("counterexample_2d", nsteps * dt, x0)
        dist = float(np.linalg.norm(x - exact))
        assert dist > 10.0, f"k={k}: distance {dist:.3e} after {nsteps} steps"


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


def _grad_at(f, x):
    v = f(dual_lift(tuple(x)))
    return np.array([real_part(g) for g in v.g])


def test_09_poisson_map_pushforward():
    # {F o phi, G o phi}(x) = {F, G}(phi(x)) for the hj step map phi,
    # with the chain rule applied through a finite-difference Jacobian
    cases = [
        (canonical(2), canonical_symplectic(2), "(q^2 + p^2)/2 + q^4/4"),
        (log_canonical(CHAIN3), log_canonical_bireal(CHAIN3), "x1 + x2 + x3"),
        (so3_dual(), so3_dual_cayley(), SO3_H),
    ]
    dt = 0.05
    rng = np.random.default_rng(109)
    for struct, chart, text in cases:
        h = struct.parse_hamiltonian(text)
        n = struct.dim
        for k in (1, 2):
            gf = hj_coefficients(h, chart, k)
            step = make_hj_step(gf, newton_tol=1e-13)
            phi = lambda y: step(y, dt)
            worst = 0.0
            for _ in range(50):
                f = _random_quadratic(rng, n)
                g = _random_quadratic(rng, n)
                x = rng.uniform(0.5, 1.5, size=n)
                fx = phi(x)
                jac = fd_jacobian(phi, x, h=1e-5)
                gf_x = jac.T @ _grad_at(f, fx)
                gg_x = jac.T @ _grad_at(g, fx)
                pi_x = np.array(
                    [[real_part(v) for v in row] for row in struct.tensor(tuple(x))]
                )
                pi_fx = np.array(
                    [[real_part(v) for v in row] for row in struct.tensor(tuple(fx))]
                )
                lhs = gf_x @ pi_x @ gg_x
                rhs = _grad_at(f, fx) @ pi_fx @ _grad_at(g, fx)
                worst = max(worst, abs(lhs - rhs))
            assert worst < 1e-6, f"{struct.name} hj:{k}: residual {worst:.3e}"


def test_10_structural_invariants():
    # unit laws of every chart, alpha Poisson / beta anti-Poisson,
    # Jacobi residuals of every built-in tensor, and AD-vs-FD agreement
    rng = np.random.default_rng(110)
    charts = [
        (canonical_symplectic(2), canonical(2)),
        (log_canonical_bireal(CHAIN3), log_canonical(CHAIN3)),
        (so3_dual_cayley(), so3_dual()),
    ]
    for chart, _ in charts:
        for _ in range(20):
            x = rng.uniform(0.5, 1.5, size=chart.dim)
            assert unit_law_residual(chart, tuple(x)) < 1e-14, chart.name

    for chart, struct in charts:
        n = chart.dim
        for which, sign in (("alpha", 1.0), ("beta", -1.0)):
            for _ in range(10):
                f = _random_quadratic(rng, n)
                g = _random_quadratic(rng, n)
                x = rng.uniform(0.5, 1.25, size=n)
                p = rng.standard_normal(n)
                p *= 0.3 / max(1.0, float(np.linalg.norm(p)))
                z = dual_lift(tuple(x) + tuple(p))
                out = getattr(chart, which)(z[:n], z[n:])
                fu, gu = f(out), g(out)
                lhs = 0.0
                for i in range(n):
                    lhs += real_part(fu.g[i]) * real_part(gu.g[n + i])
                    lhs -= real_part(fu.g[n + i]) * real_part(gu.g[i])
                base = np.array([real_part(o) for o in out])
                fv = f(dual_lift(tuple(base)))
                gv = g(dual_lift(tuple(base)))
                pi = struct.tensor(tuple(base))
                rhs = 0.0
                for i in range(n):
                    for j in range(n):
                        rhs += (
                            real_part(fv.g[i])
                            * real_part(pi[i][j])
                            * real_part(gv.g[j])
                        )
                assert abs(lhs - sign * rhs) < 1e-6, (chart.name, which)

    structures = [
        canonical(2),
        log_canonical(CHAIN3),
        so3_dual(),
        counterexample_2d(),
    ]
    for struct in structures:
        for _ in range(20):
            x = rng.uniform(0.5, 1.5, size=struct.dim)
            assert jacobi_residual(struct, tuple(x)) < 1e-10, struct.name

    struct = so3_dual()
    h = struct.parse_hamiltonian(SO3_H)

    def h_float(x):
        return float(evaluate(h, tuple(x)))

    for _ in range(20):
        x = rng.uniform(0.5, 1.5, size=3)
        ad = _grad_at(lambda z: evaluate(h, z), x)
        fd = fd_gradient(h_float, x)
        assert np.max(np.abs(ad - fd)) < 1e-5
