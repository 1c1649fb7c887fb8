"""Backward analysis: which Hamiltonian does the scheme actually flow?

Every hj:k map is the exact time-t flow of a modified Hamiltonian whose
Magnus series starts with H itself and picks up corrections at order
t^k.  This script prints those corrections.

First we truncate the Magnus series of the scheme's variation function:
through order k every coefficient beyond the first vanishes, which is
the whole point (the map follows H, exactly, up to t^k).  Then we do the
same for the Euler-symplectic family h_t(q,p) = K(p) + V(q + t K'(p)),
whose first correction has the closed form (1/2) V'(q) K'(p).
"""

import argparse

import numpy as np

from poissonint import (
    TimeDepHamiltonian,
    canonical,
    canonical_symplectic,
    evaluate,
    hj_coefficients,
    magnus_truncate,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--kmax", type=int, default=3)
    ap.add_argument("--point", type=float, nargs=2, default=[0.8, 0.6])
    args = ap.parse_args()

    struct = canonical(2)
    chart = canonical_symplectic(2)
    h = struct.parse_hamiltonian("(q^2 + p^2)/2 + q^4/4")
    x = tuple(args.point)
    href = float(evaluate(h, x))

    print(f"H = (q^2 + p^2)/2 + q^4/4 at {x}: H = {href:.12f}")
    print()
    print("modified-Hamiltonian coefficients of the hj:k schemes")
    for k in range(1, args.kmax + 1):
        gf = hj_coefficients(h, chart, k)
        ht = TimeDepHamiltonian.from_variation(gf, k)
        series = magnus_truncate(ht, struct, k)
        vals = series.evaluate(x)
        cells = " ".join(f"{v:+.3e}" for v in vals)
        print(f"  hj:{k}  Omega_1..{k} = [{cells}]   Omega_1 - H = {vals[0] - href:+.3e}")

    print()
    print("Euler-symplectic family h_t = p^2/2 + (q + t p)^4/4")

    def ht_fn(t, point):
        q, p = point
        s = q + t * p
        return 0.5 * p * p + 0.25 * s * s * s * s

    series = magnus_truncate(TimeDepHamiltonian.from_time_function(ht_fn, 3), struct, 3)
    q, p = x
    print(f"  Omega_2 computed = {float(series.coeffs[1](x)):+.12f}")
    print(f"  (1/2) V'(q)K'(p) = {0.5 * q**3 * p:+.12f}")
    eps = 0.1
    mod = series.modified_field(eps)
    print(f"  modified Hamiltonian at eps = {eps}: {float(mod(x)):.12f}")


if __name__ == "__main__":
    main()
