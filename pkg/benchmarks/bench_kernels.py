"""Time the compiled and pure-Python kernels on the same inputs.

    python benchmarks/bench_kernels.py [--repeat 200]

Prints one line per (kernel, shape) with the per-call time of each backend
and the speed-up, after checking that both give the same answer.
"""

import argparse
import timeit

import numpy as np

from optslater import _tables
from optslater._backend import available_backends, get_kernels
from optslater.fock import haar_frame, random_state

SHAPES = [(3, 6), (3, 8), (4, 9), (5, 10)]


def cases(n, d, seed=0):
    rng = np.random.default_rng(seed)
    state = random_state(n, d, seed=rng)
    F = haar_frame(d, n, rng)
    table = _tables.creation_table(n, d)
    rows = _tables.subsets(n, d)
    return {
        "minors": lambda k: k.minors(F, rows),
        "interior": lambda k: k.interior(state.vector, F[:, 1:], table),
        "update_slot": lambda k: k.update_slot(state.vector, F.copy(), 0, table, 1e-13),
        "sweep": lambda k: k.sweep(state.vector, F.copy(), table, 1e-13),
    }


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=200)
    args = ap.parse_args(argv)
    names = available_backends()
    if "cython" not in names:
        print("compiled extension not built; only the python backend is available")
    kernels = {name: get_kernels(name) for name in names}
    print(f"{'kernel':<12} {'N,d':>6} " + " ".join(f"{n + ' us':>12}" for n in names) + "   speed-up")
    for n, d in SHAPES:
        for kname, fn in cases(n, d).items():
            outs = {b: fn(k) for b, k in kernels.items()}
            ref = np.asarray(outs["python"], dtype=complex)
            for b, out in outs.items():
                assert np.allclose(np.asarray(out, dtype=complex), ref, atol=1e-10), (kname, b)
            times = {b: min(timeit.repeat(lambda: fn(k), number=args.repeat, repeat=3)) / args.repeat * 1e6
                     for b, k in kernels.items()}
            row = " ".join(f"{times[b]:12.2f}" for b in names)
            speed = times["python"] / times["cython"] if "cython" in times else float("nan")
            print(f"{kname:<12} {f'{n},{d}':>6} {row}   {speed:8.1f}x")


if __name__ == "__main__":
    main()
