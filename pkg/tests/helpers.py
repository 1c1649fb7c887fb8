"""Shared finite-difference oracles and small utilities for the test suite."""

import math

import numpy as np


def central_diff(f, x, i, h=1e-6):
    """First partial of a scalar function of a point, central stencil."""
    xp = np.array(x, dtype=float)
    xm = xp.copy()
    xp[i] += h
    xm[i] -= h
    return (f(xp) - f(xm)) / (2 * h)


def fd_gradient(f, x, h=1e-6):
    return np.array([central_diff(f, x, i, h) for i in range(len(x))])


def fd_jacobian(f, x, h=1e-6):
    """Jacobian of a vector function by central differences, rows = outputs."""
    x = np.array(x, dtype=float)
    cols = []
    for i in range(len(x)):
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        cols.append((np.asarray(f(xp)) - np.asarray(f(xm))) / (2 * h))
    return np.array(cols).T


def fd_time_derivative(f, order, h):
    """n-th derivative of a scalar function of one variable at 0.

    Central stencils, exact degree depends on order; adequate for
    tolerance-level comparisons up to order 3.
    """
    if order == 0:
        return f(0.0)
    if order == 1:
        return (f(h) - f(-h)) / (2 * h)
    if order == 2:
        return (f(h) - 2 * f(0.0) + f(-h)) / (h * h)
    if order == 3:
        return (f(2 * h) - 2 * f(h) + 2 * f(-h) - f(-2 * h)) / (2 * h ** 3)
    raise ValueError(order)


def fit_slope(hs, errs):
    """Least-squares slope of log err against log h."""
    hs = np.asarray(hs, dtype=float)
    errs = np.asarray(errs, dtype=float)
    return np.polyfit(np.log(hs), np.log(errs), 1)[0]


def rand_point(rng, n, lo=0.5, hi=1.5):
    return lo + (hi - lo) * rng.random(n)


def rel_err(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    scale = max(1.0, float(np.max(np.abs(b))))
    return float(np.max(np.abs(a - b))) / scale


assert math.isclose(fd_time_derivative(lambda t: t * t * t, 3, 1e-2), 6.0, rel_tol=1e-6)
