"""Compiled kernels versus the pure-numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--quick]

The fallback timings come from a child process started with
VTYPE_SGE_DISABLE_JIT=1, so every kernel (and every helper it calls) runs as
plain Python. Each case runs once untimed first, which keeps numba
compilation out of the numbers; the best of ``--repeat`` runs is reported.
"""
import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def build_cases(quick):
    from vtype_sge.dynamics import integrate
    from vtype_sge.entanglement import negativity_batch
    from vtype_sge.linalg import hermitian_eigenvalues
    from vtype_sge.model import ReducedState, SystemParams, rhs_pumped_kernel
    from vtype_sge.validation import random_support_state

    rng = np.random.default_rng(0)
    t_max = 0.5 if quick else 5.0
    p = SystemParams.from_preset("R0.83", Lambda1=0.08, Lambda2=0.08)
    emu = ReducedState.basis("emu")
    cases = {
        f"RK4 step doubling, {int(round(t_max / 1e-3))} steps":
            lambda: integrate(rhs_pumped_kernel, emu, t_max, 1e-3, p, negativity=False),
    }
    for n in (9, 27 if quick else 81):
        x = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        m = (x + x.conj().T) / 2
        cases[f"complex Jacobi, {n}x{n}"] = lambda m=m: hermitian_eigenvalues(m)
    count = 2_000 if quick else 20_000
    states = np.array([random_support_state(rng).vector for _ in range(count)])
    cases[f"batched negativity, {count} states"] = lambda: negativity_batch(states)
    return cases


def time_cases(quick, repeat):
    return {name: best_of(fn, repeat) for name, fn in build_cases(quick).items()}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="smaller problem sizes")
    ap.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args(argv)

    if args.child:
        json.dump(time_cases(args.quick, args.repeat), sys.stdout)
        return

    from vtype_sge import _jit

    if not _jit.HAS_NUMBA:
        raise SystemExit("numba is unavailable or disabled; nothing to compare")
    compiled = time_cases(args.quick, args.repeat)
    cmd = [sys.executable, __file__, "--child", "--repeat", "1"]
    if args.quick:
        cmd.append("--quick")
    env = dict(os.environ, VTYPE_SGE_DISABLE_JIT="1")
    child = subprocess.run(cmd, env=env, capture_output=True, text=True, check=True)
    fallback = json.loads(child.stdout)

    print(f"{'case':<38}{'numba [s]':>12}{'numpy [s]':>12}{'speedup':>10}")
    for name, tc in compiled.items():
        tp = fallback[name]
        print(f"{name:<38}{tc:>12.4g}{tp:>12.4g}{tp / tc:>9.0f}x")


if __name__ == "__main__":
    main()
