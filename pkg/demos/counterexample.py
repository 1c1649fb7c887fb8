"""A leaf-preserving Poisson scheme that is the flow of nothing.

The map x -> exp(dt^k) R(dt) x deviates from the rotation flow of
H = (x^2 + y^2)/2 by O(dt^k) per step on the unit circle, and each step
is a Poisson diffeomorphism of the structure pi_12 = -(x^2 + y^2).  Yet
no time-dependent Hamiltonian generates the family: the inflation
exp(dt^k) is an outer automorphism (a rotation-dilation class that
Poisson cohomology detects), so backward analysis has no modified
Hamiltonian to offer and the per-step deviation accumulates without
cancellation.  Iterates leave every bounded set.
"""

import argparse
import math

import numpy as np

from poissonint import counterexample_step, exact_flow


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--dt", type=float, default=0.1)
    args = ap.parse_args()

    k, dt = args.k, args.dt
    x0 = np.array([1.0, 0.0])

    print(f"one-step deviation from the exact flow at (1, 0), slope {k} expected")
    prev = None
    for trial_dt in (0.2, 0.1, 0.05, 0.025):
        err = np.linalg.norm(
            counterexample_step(k, trial_dt, x0)
            - exact_flow("counterexample_2d", trial_dt, x0)
        )
        note = "" if prev is None else f"   ratio {prev / err:5.2f}"
        print(f"  dt = {trial_dt:<6} error = {err:.6e}{note}")
        prev = err

    # long horizon: exponential escape at rate dt^k per step
    n_escape = math.ceil(math.log(11.0) / dt**k)
    x = x0.copy()
    for _ in range(n_escape):
        x = counterexample_step(k, dt, x)
    dist = np.linalg.norm(x - exact_flow("counterexample_2d", n_escape * dt, x0))
    print()
    print(f"per-step norm inflation factor: exp(dt^{k}) = {math.exp(dt**k):.12f}")
    print(
        f"after {n_escape} steps at dt = {dt}: |x| = {np.linalg.norm(x):.4f}, "
        f"distance to the exact flow = {dist:.4f} (> 10 |x0|)"
    )


if __name__ == "__main__":
    main()
