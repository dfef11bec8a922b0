"""Time the compiled SMO sweep kernel against the pure-numpy fallback.

Both lanes produce bit-identical iterates, so this only measures speed.
The driver in noisefp._smo is reused as-is; the lane is swapped by
rebinding its ``smo_sweeps`` symbol around each timed run.

Usage: python3 benchmarks/bench_smo.py [--sizes 64,128,256] [--repeats 5]
"""

import argparse
import time

import numpy as np

import noisefp._smo as smo_driver
from noisefp import _smo_py
from noisefp.kernels import gram, rbf

try:
    from noisefp import _smo_cy
except ImportError:
    _smo_cy = None


def make_problem(m: int, seed: int):
    """Two overlapping gaussian classes; overlap keeps the solver busy."""
    rng = np.random.default_rng(seed)
    d = 8
    y = np.where(np.arange(m) % 2 == 0, 1.0, -1.0)
    x = rng.normal(size=(m, d)) + 0.7 * y[:, None]
    return gram(x, rbf(0.5)), y


def run_lane(lane, problems, c=10.0):
    original = smo_driver.smo_sweeps
    smo_driver.smo_sweeps = lane.smo_sweeps
    try:
        start = time.perf_counter()
        results = [smo_driver.solve(g, y, c) for g, y in problems]
        elapsed = time.perf_counter() - start
    finally:
        smo_driver.smo_sweeps = original
    return elapsed, results


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="64,128,256,512",
                        help="comma-separated training-set sizes")
    parser.add_argument("--repeats", type=int, default=3,
                        help="timed repeats per size (best is reported)")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    if _smo_cy is None:
        print("compiled lane unavailable; timing the pure-python lane only")
    lanes = [("python", _smo_py)] + ([("cython", _smo_cy)] if _smo_cy else [])

    header = f"{'m':>6}  " + "".join(f"{name + ' (s)':>14}" for name, _ in lanes)
    if _smo_cy is not None:
        header += f"{'speedup':>10}  identical"
    print(header)
    for m in sizes:
        problems = [make_problem(m, args.seed + k) for k in range(4)]
        best = {}
        outputs = {}
        for name, lane in lanes:
            times = []
            for _ in range(args.repeats):
                elapsed, results = run_lane(lane, problems)
                times.append(elapsed)
            best[name] = min(times)
            outputs[name] = results
        line = f"{m:>6}  " + "".join(f"{best[name]:>14.4f}" for name, _ in lanes)
        if _smo_cy is not None:
            same = all(
                np.array_equal(a[0], b[0]) and a[1] == b[1] and a[2:] == b[2:]
                for a, b in zip(outputs["python"], outputs["cython"])
            )
            line += f"{best['python'] / best['cython']:>10.2f}  {'yes' if same else 'NO'}"
        print(line)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
