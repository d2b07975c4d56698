"""Time the compiled kernels against the numpy fallback.

Run from the repository root::

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each kernel is called with identical inputs on both backends; the script also
checks that the outputs agree bit for bit before reporting timings.
"""
import argparse
import timeit

import numpy as np

from robustsig import _kernels_py

try:
    from robustsig import _kernels as _kernels_c
except ImportError:  # extension not built
    _kernels_c = None


def _cases():
    rng = np.random.default_rng(0)
    eps = rng.standard_normal((250, 1000))
    x = rng.normal(0.0, 1.0, 100_000)
    xs = np.linspace(-9.0, 9.0, 1801)
    u0 = (xs > 1.78).astype(float)
    steps = 2000
    return {
        "optimal_paths 250x1000": (
            "optimal_paths", (eps, 0.5, 1.0, 0.0, 0.0, 1.7804643416920256, 1)),
        "rolling_block_variances n=1e5 m=316": (
            "rolling_block_variances", (x, 316, 512)),
        "dp_value n=400": ("dp_value", (400, 1.78, 0.5, 1.0, 1, False)),
        "dp_value policy n=400": ("dp_value", (400, 1.78, 0.5, 1.0, 1, True)),
        "g_heat_march 1801x2000": (
            "g_heat_march", (u0, 0.24, 0.06, np.zeros(steps), np.ones(steps))),
    }


def _same(a, b):
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    if isinstance(a, np.ndarray):
        return a.tobytes() == b.tobytes()
    return a == b


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5, help="timing repeats (best is kept)")
    args = ap.parse_args(argv)
    if _kernels_c is None:
        print("compiled extension not available; build it with "
              "`python3 setup.py build_ext --inplace`")
        return 1

    print(f"{'kernel':<38}{'python s':>11}{'cython s':>11}{'speedup':>9}  identical")
    for label, (name, fargs) in _cases().items():
        py_fn = getattr(_kernels_py, name)
        c_fn = getattr(_kernels_c, name)
        same = _same(py_fn(*fargs), c_fn(*fargs))
        t_py = min(timeit.repeat(lambda: py_fn(*fargs), number=1, repeat=args.repeat))
        t_c = min(timeit.repeat(lambda: c_fn(*fargs), number=1, repeat=args.repeat))
        print(f"{label:<38}{t_py:>11.4f}{t_c:>11.4f}{t_py / t_c:>8.1f}x  {same}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
