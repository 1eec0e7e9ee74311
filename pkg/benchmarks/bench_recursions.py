"""Time the compiled variance recursions against the pure-Python fallback.

Run from the repository root after building the extension::

    python3 setup.py build_ext --inplace
    python3 benchmarks/bench_recursions.py --n 10000 --repeat 5

Each row reports the best of ``--repeat`` timings for one log-likelihood
evaluation with gradient, and the speed-up of the compiled kernel.
"""

from __future__ import annotations

import argparse
import sys
import timeit

import numpy as np

from perpstat.volatility import recursions_python

KERNELS = {
    "gjr": ("gjr_loglik", np.array([0.05, 0.05, 0.1, 0.85]), ()),
    "egarch": ("egarch_loglik", np.array([0.0, -0.1, 0.2, 0.9]), (False,)),
    "parch": ("parch_loglik", np.array([0.05, 0.1, 0.3, 0.8, 1.5]), ()),
}


def _time(mod, name, params, extra, e, repeat):
    sigma2 = np.empty(e.shape[0])
    grad = np.empty(params.shape[0])
    fn = getattr(mod, name)
    timer = timeit.Timer(lambda: fn(params, e, 1.0, *extra, sigma2, grad))
    return min(timer.repeat(repeat=repeat, number=1))


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=10_000, help="series length")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    try:
        from perpstat.volatility import _recursions as compiled
    except ImportError:
        print("compiled extension not built; run: python3 setup.py build_ext --inplace",
              file=sys.stderr)
        return 1
    e = np.random.default_rng(args.seed).standard_normal(args.n)
    print(f"{'kernel':<8} {'python ms':>10} {'compiled ms':>12} {'speed-up':>9}")
    for label, (name, params, extra) in KERNELS.items():
        py = _time(recursions_python, name, params, extra, e, args.repeat)
        cy = _time(compiled, name, params, extra, e, args.repeat)
        print(f"{label:<8} {py * 1e3:>10.2f} {cy * 1e3:>12.3f} {py / cy:>8.0f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
