"""Quintic Euler factor at p = 2^20 - 3, phi = -1, via the streaming single-point path.

Expected: a_1 = -1576492860, a_2 = 2672053179370 * p.
"""

import sys
import time

from cyzeta import compute_points_streaming, get_operator

P = 2**20 - 3


def main():
    op = get_operator("quintic")
    t0 = time.perf_counter()
    res = compute_points_streaming(op, P, [P - 1], track_degree=False)
    (r,) = res.records
    dt = time.perf_counter() - t0
    a1, a2 = r.coeffs
    print(f"p={P} phi*={r.phi_star} flag={r.flag}")
    print(f"a1={a1} a2/p={a2 // P} ({dt:.1f}s)")
    ok = a1 == -1576492860 and a2 == 2672053179370 * P
    print("match" if ok else "MISMATCH")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
