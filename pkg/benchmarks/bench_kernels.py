"""Compare the compiled and pure-Python search kernels.

Usage::

    python benchmarks/bench_kernels.py [--repeat N]

Each workload is run on both backends; the outputs must agree before any
timing is reported.  The last section times whole computations in a
subprocess with ``FINTOP_PURE_PYTHON`` set and unset.
"""

import argparse
import os
import random
import subprocess
import sys
import timeit

from fintop import _kernels_py
from fintop.kernels import closure_masks

try:
    from fintop import _kernels as _kernels_c
except ImportError:
    _kernels_c = None


def chain_forest(n, seed):
    """A random forest: each node points at one earlier node or at nothing."""
    rng = random.Random(seed)
    succ = [[rng.randrange(i)] if i and rng.random() < 0.7 else [] for i in range(n)]
    return closure_masks(n, succ)


def functional_chain(n, size, seed):
    """``n`` variables linked by random functions ``a[i+1] = t[a[i]]`` on every other step."""
    rng = random.Random(seed)
    edges = [(i, i + 1, [rng.randrange(size) for _ in range(size)]) for i in range(0, n - 1, 2)]
    return [size] * n, None, edges, None


def injective_block(n, size):
    """``n`` variables that must be pairwise distinct."""
    return [size] * n, None, [], [0] * n


WORKLOADS = [
    ("closed_subsets forest n=18", "closed_subsets", chain_forest(18, 1)),
    ("closed_subsets forest n=22", "closed_subsets", chain_forest(22, 2)),
    ("solve_functional chain n=10 k=4", "solve_functional", functional_chain(10, 4, 3)),
    ("solve_functional injective n=7 k=8", "solve_functional", injective_block(7, 8)),
]

END_TO_END = (
    "from fintop.harness.fixtures import get_fixture\n"
    "from fintop.elementary import dependent_product_elementary\n"
    "from fintop.harness.oracles import verify_lemma1\n"
    "fx = get_fixture('C')\n"
    "assert verify_lemma1(dependent_product_elementary(fx.f, fx.h)).ok\n"
)


def time_call(fn, args, repeat):
    return min(timeit.repeat(lambda: fn(*args), number=1, repeat=repeat))


def end_to_end(pure):
    env = dict(os.environ)
    if pure:
        env["FINTOP_PURE_PYTHON"] = "1"
    else:
        env.pop("FINTOP_PURE_PYTHON", None)
    stmt = f"import time; t = time.perf_counter()\n{END_TO_END}print(time.perf_counter() - t)"
    out = subprocess.run([sys.executable, "-c", stmt], env=env, check=True, capture_output=True)
    return float(out.stdout)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    if _kernels_c is None:
        print("compiled extension not built; only the Python backend is available")
        return 1
    print(f"{'workload':40} {'results':>9} {'python s':>10} {'cython s':>10} {'speedup':>8}")
    for label, name, data in WORKLOADS:
        py_fn, c_fn = getattr(_kernels_py, name), getattr(_kernels_c, name)
        result = py_fn(*data)
        if c_fn(*data) != result:
            print(f"{label}: backends disagree")
            return 1
        t_py = time_call(py_fn, data, args.repeat)
        t_c = time_call(c_fn, data, args.repeat)
        print(f"{label:40} {len(result):9d} {t_py:10.4f} {t_c:10.4f} {t_py / t_c:7.1f}x")
    t_py, t_c = end_to_end(True), end_to_end(False)
    print(f"{'clause tables on FIX-C (end to end)':40} {'':9} {t_py:10.4f} {t_c:10.4f} {t_py / t_c:7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
