"""Benchmark the compiled kernels against the pure-Python fallback.

Times the two hot exponent-set kernels (minimalization and pairwise product)
on random staircases, then times an end-to-end saturation-quotient census in
a subprocess per backend.

Run:  python3 benchmarks/bench_kernels.py [--sizes 200,800,3200] [--repeat 5]
"""

import argparse
import os
import random
import statistics
import subprocess
import sys
import time

from reesdensity import _kernels_py as pure

try:
    from reesdensity import _speedups as compiled
except ImportError:
    compiled = None

CENSUS_SCRIPT = (
    "from reesdensity import RingSpec, ideal_module, power, quotient_total_length\n"
    "from reesdensity.backend import BACKEND\n"
    "import time\n"
    "ring = RingSpec(('x', 'y'))\n"
    "m = ideal_module(ring, [(2, 0), (1, 1)])\n"
    "t0 = time.perf_counter()\n"
    "total = sum(quotient_total_length(power(m, n))[0] for n in range(1, 41))\n"
    "print(BACKEND, total, time.perf_counter() - t0)\n"
)


def random_staircase(rng, size, width=3, height=30):
    return tuple(
        tuple(rng.randrange(0, height + 1) for _ in range(width))
        for _ in range(size)
    )


def best_of(fn, args, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times), statistics.median(times)


def bench_kernels(sizes, repeat):
    rng = random.Random(7)
    backends = [("python", pure)]
    if compiled is not None:
        backends.append(("compiled", compiled))
    print(f"{'kernel':<12} {'size':>6} " + "".join(f"{name:>12}" for name, _ in backends) + f"{'speedup':>10}")
    for size in sizes:
        exps = random_staircase(rng, size)
        half = exps[: size // 2]
        for label, call_args in (
            ("minimalize", (exps,)),
            ("product", (half, half[: max(2, size // 20)])),
        ):
            row = []
            for _, mod in backends:
                fn = getattr(mod, f"{label}_exponents")
                best, _ = best_of(fn, call_args, repeat)
                row.append(best)
            speedup = row[0] / row[-1] if len(row) > 1 and row[-1] > 0 else float("nan")
            cells = "".join(f"{t * 1e3:>10.2f}ms" for t in row)
            print(f"{label:<12} {size:>6} {cells}{speedup:>9.1f}x")


def bench_census():
    print("\nend-to-end: sum of census totals for (x^2,xy)^n, n <= 40")
    for flag in (None, "1"):
        env = dict(os.environ)
        if flag:
            env["REESDENSITY_PURE_PYTHON"] = flag
        else:
            env.pop("REESDENSITY_PURE_PYTHON", None)
        out = subprocess.run(
            [sys.executable, "-c", CENSUS_SCRIPT], env=env,
            capture_output=True, text=True, check=True,
        )
        backend, total, elapsed = out.stdout.split()
        print(f"  {backend:<10} total={total}  {float(elapsed):.3f}s")


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="200,800,3200")
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    sizes = [int(s) for s in args.sizes.split(",")]
    if compiled is None:
        print("compiled extension not available; timing the fallback only")
    bench_kernels(sizes, args.repeat)
    bench_census()


if __name__ == "__main__":
    main()
