#!/usr/bin/env python3
"""Print a table of limiting tail relative-error constants.

Covers the closed-form single-eigenvalue limits over a grid of (n, nu0),
the noncentral beta family, and the general multiple-eigenvalue limits for
a few built statistics, so the three routes can be compared side by side.
"""

import numpy as np

from qfratio import (
    beta_limit,
    beta_matrices,
    edge_structure,
    limit_multiple,
    limit_simple,
    ls_serial_corr,
    ratio_n2,
    support,
)


def main():
    print("single-eigenvalue limits")
    print(f"{'n':>3} {'nu0':>5} {'t0':>10} {'u0':>10} {'RE':>10}")
    for n in (2, 3, 5, 8):
        for nu0 in (0.0, 1.0, 2.0):
            lim = limit_simple(n, nu0)
            print(f"{n:>3} {nu0:>5.1f} {lim.t0:>10.6f} {lim.u0:>10.6f} {lim.RE:>10.6f}")

    print("\nnoncentral beta limits")
    print(f"{'n':>3} {'m':>3} {'theta':>6} {'RE':>10}")
    for n, m in ((4, 2), (6, 3), (10, 4)):
        for theta in (0.0, 1.0, 4.0):
            print(f"{n:>3} {m:>3} {theta:>6.1f} {beta_limit(n, m, theta).RE:>10.6f}")

    print("\ngeneral limits from edge structures")
    instances = {
        "ratio e2/e1, mu=(0.2,2)": ratio_n2(0.2, 2.0),
        "lag-2 serial corr, n=3": ls_serial_corr(3, 2, mu=np.array([0.4, -1.2, 0.7])),
        "beta n=6 m=2, mu=(1,0)": beta_matrices(6, 2, [1.0, 0.0]),
    }
    print(f"{'instance':<28} {'side':>6} {'m':>3} {'RE_cdf':>10} {'RE_pdf':>10}")
    for name, rt in instances.items():
        info = support(rt)
        for side, wanted in (("right", info.in_CR), ("left", info.in_CL)):
            if not wanted:
                continue
            edge = edge_structure(rt, info, side)
            lim = limit_multiple(rt.n, edge)
            print(f"{name:<28} {side:>6} {edge.m:>3} "
                  f"{lim.RE_cdf:>10.6f} {lim.RE_pdf:>10.6f}")


if __name__ == "__main__":
    main()
