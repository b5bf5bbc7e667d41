"""Time the compiled sampling kernels against the numpy fallback.

Run with ``python3 benchmarks/bench_kernels.py [--n N] [--repeat R]``.
"""

import argparse
import timeit

import numpy as np

from permchan import _pycore, kernels

try:
    from permchan import _core
except ImportError:
    _core = None


def workload(n, rng):
    cdf = kernels.cumulative(rng.dirichlet(np.ones(5), size=4))
    rows = rng.integers(0, 4, n).astype(np.int64)
    return {
        "sample_rows": lambda impl: impl.sample_rows(rows, cdf, rng.random(n)),
        "shuffle": lambda impl: impl.shuffle(np.arange(n, dtype=np.int64), rng.random(n)),
        "bincount": lambda impl: impl.bincount(rows, 4),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=1_000_000, help="block length (default %(default)s)")
    ap.add_argument("--repeat", type=int, default=5, help="timing repeats (default %(default)s)")
    args = ap.parse_args(argv)

    backends = {"python": _pycore}
    if _core is not None:
        backends["compiled"] = _core
    else:
        print("compiled extension not built; timing the fallback only")

    rng = np.random.default_rng(0)
    print(f"{'kernel':<12}" + "".join(f"{b:>14}" for b in backends) + f"{'speedup':>10}")
    for name, fn in workload(args.n, rng).items():
        best = {b: min(timeit.repeat(lambda: fn(impl), number=1, repeat=args.repeat))
                for b, impl in backends.items()}
        ratio = best["python"] / best["compiled"] if "compiled" in best else float("nan")
        print(f"{name:<12}" + "".join(f"{t * 1e3:>12.2f}ms" for t in best.values()) + f"{ratio:>9.1f}x")


if __name__ == "__main__":
    main()
