#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallbacks.

Times the hot kernels (frame transform, Ricci contraction, flow right-hand
side) on 3x3 inputs under both backends, then an end-to-end flow integration
per backend via subprocesses (the backend is fixed at import time, so each
end-to-end run needs its own interpreter).

Usage:
    python benchmarks/bench_kernels.py [--repeat N] [--skip-end-to-end]
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from ricciflow import _kernels as kern

_END_TO_END = """
import time
import numpy as np
import ricciflow as rf
traj = rf.integrate(rf.preset_constants("so3"), np.eye(3),
                    rf.FlowConfig(method="rk_adaptive", t_end=2.0))  # warm-up / jit
t0 = time.perf_counter()
for _ in range(5):
    traj = rf.integrate(rf.preset_constants("so3"), np.eye(3),
                        rf.FlowConfig(method="rk_adaptive", t_end=2.0))
dt = (time.perf_counter() - t0) / 5
print(f"{rf.BACKEND} {dt:.4f} {traj.termination}")
"""


def _sample_inputs(seed=0):
    rng = np.random.default_rng(seed)
    raw = np.zeros((3, 3, 3))
    for k in range(3):
        for i in range(3):
            for j in range(i + 1, 3):
                v = rng.uniform(-2.0, 2.0)
                raw[k, i, j] = v
                raw[k, j, i] = -v
    b = np.triu(rng.uniform(-1.0, 1.0, (3, 3)), k=1) + np.diag(rng.uniform(0.5, 2.0, 3))
    return raw, b


def _time_call(fn, args, repeat):
    fn(*args)  # warm-up (jit compile on the numba side)
    t0 = time.perf_counter()
    for _ in range(repeat):
        fn(*args)
    return (time.perf_counter() - t0) / repeat


def bench_kernels(repeat):
    c, b = _sample_inputs()
    qinv = np.linalg.solve(b, np.eye(3))
    gamma = np.asarray(kern.NUMPY_IMPL["connection_coeffs"](c))
    cases = {
        "transform_constants": (c, b, qinv),
        "ricci_parts": (c,),
        "connection_coeffs": (c,),
        "ricci_from_connection": (c, gamma),
        "ricci_combined": (c,),
        "upper_tri_inverse": (b,),
        "flow_rhs": (c, b, False),
    }
    print(f"{'kernel':<24} {'numpy':>12} {'numba':>12} {'speedup':>9}")
    for name, args in cases.items():
        t_np = _time_call(kern.NUMPY_IMPL[name], args, repeat)
        if kern.NUMBA_IMPL is None:
            print(f"{name:<24} {t_np * 1e6:>10.2f}us {'n/a':>12} {'n/a':>9}")
            continue
        t_nb = _time_call(kern.NUMBA_IMPL[name], args, repeat)
        print(f"{name:<24} {t_np * 1e6:>10.2f}us {t_nb * 1e6:>10.2f}us {t_np / t_nb:>8.1f}x")


def bench_end_to_end():
    print("\nend-to-end: adaptive flow of the so3 preset to collapse (mean of 5)")
    for backend in ("numpy", "numba"):
        env = dict(os.environ, RICCIFLOW_BACKEND=backend)
        proc = subprocess.run([sys.executable, "-c", _END_TO_END],
                              env=env, capture_output=True, text=True)
        if proc.returncode != 0:
            print(f"{backend}: failed\n{proc.stderr}")
            continue
        name, dt, termination = proc.stdout.split()
        print(f"{name:<8} {float(dt) * 1e3:8.1f} ms   ({termination})")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=20000)
    ap.add_argument("--skip-end-to-end", action="store_true")
    args = ap.parse_args()
    print(f"active backend: {kern.BACKEND}")
    bench_kernels(args.repeat)
    if not args.skip_end_to_end:
        bench_end_to_end()


if __name__ == "__main__":
    main()
