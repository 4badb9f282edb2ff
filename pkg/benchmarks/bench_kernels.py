"""Time the compiled kernels against the numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import sys
import timeit
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from conftest import random_instance  # noqa: E402
from ssdfolio import _kernels_py as pure  # noqa: E402
from ssdfolio import kernels  # noqa: E402
from ssdfolio.ssd import build_ssd_block, solve_nominal_ssd  # noqa: E402

try:
    from ssdfolio import _kernels as compiled
except ImportError:
    compiled = None


def cases():
    rng = np.random.default_rng(0)
    r, lv = rng.normal(size=52), rng.normal(size=52)
    p = np.full(52, 1 / 52)
    yield "lpm_profile T=K=52", lambda k: k.lpm_profile(r, lv, p)

    scen = random_instance(np.random.default_rng(1), 6, 12)
    block = build_ssd_block(scen)
    coef = np.random.default_rng(2).normal(size=6)
    args = (np.ascontiguousarray(scen.returns), np.ascontiguousarray(scen.probs),
            np.ascontiguousarray(block.levels), np.ascontiguousarray(block.targets),
            coef, 100, 30, np.ones(6, dtype=bool), 1e-12)
    yield "grid_best N=6 T=12", lambda k: k.grid_best(*args)

    big = random_instance(np.random.default_rng(3), 24, 52)

    def ssd_fit(k):
        saved = kernels.simplex_iterate, kernels.lpm_profile
        kernels.simplex_iterate, kernels.lpm_profile = k.simplex_iterate, k.lpm_profile
        try:
            solve_nominal_ssd(big)
        finally:
            kernels.simplex_iterate, kernels.lpm_profile = saved

    yield "nominal SSD fit N=24 T=52", ssd_fit


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if compiled is None:
        print("compiled kernels not built; only the numpy fallback is available")
    print(f"{'case':<28}{'numpy (ms)':>12}{'compiled (ms)':>15}{'speedup':>10}")
    for name, fn in cases():
        t_py = min(timeit.repeat(lambda: fn(pure), number=1, repeat=args.repeat)) * 1e3
        if compiled is None:
            print(f"{name:<28}{t_py:>12.3f}{'-':>15}{'-':>10}")
            continue
        t_c = min(timeit.repeat(lambda: fn(compiled), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<28}{t_py:>12.3f}{t_c:>15.3f}{t_py / t_c:>9.1f}x")


if __name__ == "__main__":
    main()
