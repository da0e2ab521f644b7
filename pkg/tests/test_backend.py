import random

import numpy as np
import pytest

from commitorder import _backend
from commitorder.equilibrium import solve_s1_first
from commitorder.lp import linprog
from commitorder.montecarlo import simulate
from support import pair, scenario

needs_core = pytest.mark.skipif(not _backend.HAVE_CORE, reason="compiled core not built")


@pytest.fixture
def restore_backend():
    before = _backend.active()
    yield
    _backend.use(before)


def run_lps(seed):
    rng = random.Random(seed)
    out = []
    for _ in range(50):
        n = rng.randint(2, 5)
        c = [rng.randint(-4, 4) for _ in range(n)]
        A = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(3)] + [[1] * n]
        b = [rng.randint(0, 5) for _ in range(3)] + [7]
        r = linprog(c, A, b)
        out.append((r.status, r.value, tuple(r.x or ())))
    return out


@needs_core
def test_core_and_python_kernels_agree(restore_backend):
    s = scenario("example_3_1")
    g1, g2 = pair("example_3_1_s1_first")
    results = {}
    for kind in ("python", "core"):
        _backend.use(kind)
        results[kind] = (run_lps(3), simulate(s, g1, g2, 50_000, 9).mean)
    assert results["python"] == results["core"]


@needs_core
def test_core_tally_matches_python_on_raw_inputs(restore_backend):
    from commitorder import _core, _pycore
    from commitorder.montecarlo import _tables, episode_uniforms

    s = scenario("example_4_1")
    g1, g2 = pair("example_4_1_s1_first")
    tabs = _tables(s, g1, g2)
    u = episode_uniforms(5, 0, 20_000)
    nw1, nw2 = tabs[-1].shape
    a = _core.tally(u, *tabs, s.n, nw1, nw2)
    b = _pycore.tally(u, *tabs, s.n, nw1, nw2)
    assert np.array_equal(a, b) and a.sum() == 20_000


def test_switching_is_validated(restore_backend):
    with pytest.raises(ValueError):
        _backend.use("gpu")
    _backend.use("python")
    assert _backend.active() == "python"
    assert solve_s1_first(scenario("silence")).utilities.s1 > 0
