import numpy as np
import pytest

from commitorder import montecarlo
from commitorder.equilibrium import expected_utilities
from commitorder.montecarlo import SimEstimate, episode_uniforms, simulate
from commitorder.strategy import truthful1, truthful2
from support import pair, scenario


@pytest.fixture(scope="module")
def ex31():
    s = scenario("example_3_1")
    return (s, *pair("example_3_1_s1_first"))


def test_streams_are_counter_addressed():
    full = episode_uniforms(7, 0, 50)
    assert np.array_equal(full[20:], episode_uniforms(7, 20, 30))
    assert full.shape == (50, 3) and (full >= 0).all() and (full < 1).all()
    assert not np.array_equal(full, episode_uniforms(8, 0, 50))


def test_deterministic_and_shard_invariant(ex31, monkeypatch):
    s, g1, g2 = ex31
    base = simulate(s, g1, g2, 30_000, 42)
    assert simulate(s, g1, g2, 30_000, 42) == base
    monkeypatch.setattr(montecarlo, "SHARD", 4_096)
    assert simulate(s, g1, g2, 30_000, 42) == base
    assert simulate(s, g1, g2, 30_000, 42, threads=3) == base


def test_estimates_cover_exact_values(ex31):
    s, g1, g2 = ex31
    exact = expected_utilities(s, g1, g2).as_tuple()
    est = simulate(s, g1, g2, 200_000, 1)
    assert est.within(exact)
    assert est.samples == 200_000 and set(est.to_dict()["mean"]) == {"s1", "s2", "receiver"}


def test_truthful_pair_has_zero_receiver_variance():
    s = scenario("example_3_1")
    g1 = truthful1(s)
    est = simulate(s, g1, truthful2(s, g1.signals), 5_000, 3)
    assert est.mean[2] == 1.0 and est.std_error[2] == 0.0


def test_standard_error_scales_as_inverse_root_n(ex31):
    s, g1, g2 = ex31
    small = simulate(s, g1, g2, 10_000, 5).std_error
    large = simulate(s, g1, g2, 160_000, 5).std_error
    for a, b in zip(small, large):
        assert a / b == pytest.approx(4.0, rel=0.1)


def test_within_uses_k_standard_errors():
    est = SimEstimate((1.0, 2.0, 0.5), (0.1, 0.1, 0.1), 100, 0)
    assert est.within((1.25, 2.0, 0.5))
    assert not est.within((1.35, 2.0, 0.5))
    assert est.within((1.35, 2.0, 0.5), k=4)


def test_rejects_empty_run(ex31):
    s, g1, g2 = ex31
    with pytest.raises(ValueError):
        simulate(s, g1, g2, 0, 1)
