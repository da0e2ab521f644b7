"""Compare the compiled core with the pure-Python kernels.

Run with ``python3 benchmarks/bench_core.py``.  Each workload runs once per
backend after a warm-up; results must agree exactly.
"""

import time

import numpy as np

from commitorder import _backend, load_scenario, load_commitment
from commitorder.cli import fixture_path
from commitorder.equilibrium import solve_s1_first
from commitorder.montecarlo import simulate
from commitorder.persuasion import clear_cache


def _lp_workload():
    s = load_scenario(fixture_path("example_3_1.json"))
    clear_cache()
    return solve_s1_first(s).utilities


def _tally_workload():
    s = load_scenario(fixture_path("example_4_1.json"))
    g1 = load_commitment(fixture_path("example_4_1_s2_first_g1.json"))
    g2 = load_commitment(fixture_path("example_4_1_s2_first_g2.json"))
    return simulate(s, g1, g2, 1_000_000, seed=3)


def _time(fn, repeat=3):
    fn()
    best = float("inf")
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def main():
    rows = []
    for name, fn in (("exact LP (S1-first solve)", _lp_workload), ("Monte-Carlo tally (1e6)", _tally_workload)):
        res = {}
        for kind in ("python", "core"):
            _backend.use(kind)
            res[kind] = _time(fn)
        assert res["python"][1] == res["core"][1], f"{name}: backends disagree"
        rows.append((name, res["python"][0], res["core"][0]))
    _backend.use("core")
    print(f"{'workload':<28} {'python s':>10} {'core s':>10} {'speedup':>8}")
    for name, py, core in rows:
        print(f"{name:<28} {py:>10.3f} {core:>10.3f} {py / core:>8.2f}")
    return np.array([r[1:] for r in rows])


if __name__ == "__main__":
    main()
