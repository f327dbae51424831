"""Time the numba kernels against the numpy / pure-Python fallbacks.

Run ``python benchmarks/bench_kernels.py``. The compiled versions are
warmed up once before timing; the ODE fallback runs the same Python loop
uncompiled (expect it to be far slower).
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from hyperwehrl import kernels, ode_lab
from hyperwehrl.hyp_geom import DEFAULT_SPEC, disk_nodes
from hyperwehrl.su11_states import random_state


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if not kernels.HAVE_NUMBA:
        raise SystemExit("numba disabled (HYPERWEHRL_NO_NUMBA set or numba missing)")

    psi = random_state(8, 2.0, 0)
    coef = psi.holo_coeffs()
    z, omt, w = next(disk_nodes(DEFAULT_SPEC, 1, psi.zeros()))
    powers = np.array([3.0, 3.5])

    def sums_jit():
        kernels._channel_sums_jit(coef, z, omt, w, 2.0, powers, 3.0, True)

    def sums_np():
        kernels.channel_sums_numpy(coef, z, omt, w, 2.0, powers, 3.0, True)

    sums_jit()
    a = kernels._channel_sums_jit(coef, z, omt, w, 2.0, powers, 3.0, True)
    b = kernels.channel_sums_numpy(coef, z, omt, w, 2.0, powers, 3.0, True)
    agree = float(np.max(np.abs(a - b) / np.abs(b)))

    P = ode_lab.OdeParams.extremizer_consistent(3.0, gamma=3.0)
    cp = ode_lab.critical_points(P)
    lam = P.decay_rate()
    y0 = ode_lab.series_start(1.0, P)
    shoot_args = (1.0, P.a_tilde, P.b_tilde, P.e, ode_lab.TAU0, y0, 40.0, 1e-10, 1e-12,
                  0.05, 1e-9, 2 * lam, cp.xi0, lam, True)

    def ode_jit():
        kernels.shoot_kernel(*shoot_args, use_jit=True)

    def ode_py():
        kernels.shoot_kernel(*shoot_args, use_jit=False)

    ode_jit()
    rows = [
        (f"channel_sums ({z.size} nodes)", best_of(sums_jit, args.repeat),
         best_of(sums_np, args.repeat)),
        ("shoot_kernel (tau_max 40)", best_of(ode_jit, args.repeat), best_of(ode_py, 1)),
    ]
    print(f"{'kernel':32s} {'numba [s]':>10s} {'fallback [s]':>13s} {'speedup':>8s}")
    for name, tj, tp in rows:
        print(f"{name:32s} {tj:10.4f} {tp:13.4f} {tp / tj:8.1f}")
    print(f"channel_sums max relative disagreement: {agree:.2e}")


if __name__ == "__main__":
    main()
