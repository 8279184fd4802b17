import math

import numpy as np
import pytest

from advisearch import (
    Dephasing,
    InvalidArgument,
    NoiseModel,
    OracleSpec,
    ReplaceWithFixedState,
    RoundSchedule,
    UnsupportedEngine,
    alpha,
    block_statistics,
    expected_block_queries,
    iterations_for_round,
    register_dim,
    round_success_probability,
    run_block_search,
    theorem1_bound,
)

from conftest import CountingOracle, explicit_grover, random_density


def test_alpha_examples():
    assert alpha(0, 0.5, 10) == 1.0
    assert alpha(10 * math.log(2), 0.5, 10) == pytest.approx(1 / math.sqrt(2), abs=1e-15)
    vals = [alpha(i, 0.25, 3) for i in range(0, 5000, 7)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert 0 < vals[-1] < 0.1
    for eps in (0.0, 1.0, 1.5):
        with pytest.raises(InvalidArgument):
            alpha(1, eps, 10)


def test_iterations_for_round_examples():
    sch = RoundSchedule()
    assert iterations_for_round(0, sch, 1024) == 25
    assert iterations_for_round(0, sch, 4) == 1
    assert iterations_for_round(10**9, sch, 1024) == 0


def test_schedule_validation():
    for kwargs in ({"epsilon": 0.6}, {"epsilon": 0}, {"c": 0}, {"max_rounds": 0}, {"initial_state": "x"}):
        with pytest.raises(InvalidArgument):
            RoundSchedule(**kwargs)


def test_round_success_probability_examples():
    sch = RoundSchedule()
    assert round_success_probability(4, 3, NoiseModel(0.0), 0, sch, marked_in_block=False) == 0.0
    # block of 4 in an 8-dim register: M0 = 2, brute force gives 121/128
    assert iterations_for_round(0, sch, 8) == 2
    brute = explicit_grover(8, 0, 2)[0, 0].real
    assert round_success_probability(4, 3, NoiseModel(0.0), 0, sch, True) == pytest.approx(brute, abs=1e-12)
    assert brute == pytest.approx(121 / 128, abs=1e-12)
    for i in (0, 3, 50):
        assert round_success_probability(150, 10, NoiseModel(1.0), i, sch, True) == pytest.approx(1 / 256)


def test_round_probability_engines_agree():
    sch = RoundSchedule(max_rounds=6)
    for p in (0.0, 0.1, 0.5):
        for i in range(6):
            red = round_success_probability(20, 6, NoiseModel(p), i, sch, True, engine="reduced")
            full = round_success_probability(20, 6, NoiseModel(p), i, sch, True, engine="full")
            assert red == pytest.approx(full, abs=1e-10)
    # beyond the profile horizon the single round is evaluated directly
    beyond = round_success_probability(20, 6, NoiseModel(0.1), 9, sch, True)
    d = register_dim(20, 6)
    M = iterations_for_round(9, sch, d)
    assert beyond == pytest.approx(explicit_grover(d, 0, M, 0.1)[0, 0].real, abs=1e-12)


def test_reduced_engine_refuses_other_channels():
    with pytest.raises(UnsupportedEngine):
        round_success_probability(20, 6, NoiseModel(0.1, Dephasing()), 0, RoundSchedule(), True, engine="reduced")


def test_expected_block_queries_examples():
    sch = RoundSchedule()
    absent = sum(iterations_for_round(i, sch, 256) + 1 for i in range(sch.max_rounds))
    assert expected_block_queries(150, 10, NoiseModel(0.2), sch, marked_in_block=False) == absent
    # whole domain of 4 (q = 2): one iteration finds it with certainty
    assert expected_block_queries(4, 2, NoiseModel(0.0), sch, True) == pytest.approx(2.0, abs=1e-12)


def test_expected_block_queries_against_markov_oracle():
    # independent survival recursion driven by brute-force round probabilities
    sch = RoundSchedule(max_rounds=30)
    for p in (0.0, 0.2):
        d = register_dim(4, 3)
        expect, reach = 0.0, 1.0
        for i in range(sch.max_rounds):
            M = iterations_for_round(i, sch, d)
            s = explicit_grover(d, 0, M, p)[0, 0].real
            expect += reach * (M + 1)
            reach *= 1 - s
        assert expected_block_queries(4, 3, NoiseModel(p), sch, True) == pytest.approx(expect, rel=1e-12)
        assert block_statistics(4, 3, NoiseModel(p), sch).miss_probability == pytest.approx(reach, rel=1e-9, abs=1e-300)


def test_block_search_certain_success():
    f = CountingOracle(OracleSpec(4, 3))
    out = run_block_search(range(1, 5), f, NoiseModel(0.0), RoundSchedule(), np.random.default_rng(0))
    assert out.found and out.element == 3
    assert (out.rounds_used, out.quantum_queries, out.verification_queries) == (1, 1, 1)
    assert f.total == 2


def test_block_search_absent():
    f = CountingOracle(OracleSpec(1024, 900))
    sch = RoundSchedule(max_rounds=50)
    out = run_block_search(range(101, 301), f, NoiseModel(0.1), sch, np.random.default_rng(0))
    assert not out.found and out.element is None
    assert out.rounds_used == 50 and out.verification_queries == 50
    assert out.quantum_queries == sum(iterations_for_round(i, sch, 256) for i in range(50))
    assert f.total == out.total_queries
    with pytest.raises(InvalidArgument):
        run_block_search(range(5, 5), f, NoiseModel(0.1), sch, np.random.default_rng(0))


def test_block_search_fully_depolarized_rounds():
    # p = 1: every round succeeds with probability 1/d, so rounds ~ Geometric(1/d)
    f = OracleSpec(1024, 7)
    sch = RoundSchedule(max_rounds=10**6)
    d = register_dim(10, 10)
    rng = np.random.default_rng(11)
    rounds = np.array([run_block_search(range(1, 11), f, NoiseModel(1.0), sch, rng).rounds_used for _ in range(10000)])
    stderr = math.sqrt((1 - 1 / d) * d * d) / math.sqrt(rounds.size)
    assert abs(rounds.mean() - d) <= 3 * stderr


@pytest.mark.parametrize("size,p", [(100, 0.0), (150, 0.1), (300, 0.3), (60, 0.05)])
def test_expected_block_queries_vs_monte_carlo(size, p):
    sch = RoundSchedule()
    f = OracleSpec(1024, 37)
    rng = np.random.default_rng(2017)
    block = range(20, 20 + size)
    costs = np.array([run_block_search(block, f, NoiseModel(p), sch, rng).total_queries for _ in range(10000)])
    exact = expected_block_queries(size, 10, NoiseModel(p), sch, True)
    assert abs(costs.mean() - exact) <= 3 * costs.std(ddof=1) / math.sqrt(costs.size)


def test_block_search_rarely_exhausts_rounds():
    f = OracleSpec(1024, 250)
    rng = np.random.default_rng(5)
    sch = RoundSchedule()
    misses = sum(not run_block_search(range(100, 300), f, NoiseModel(0.3), sch, rng).found for _ in range(10000))
    assert misses < 10


def test_block_search_full_engine_non_symmetric_channel(rng):
    # position-dependent channel: Monte Carlo on the full engine vs exact profile
    sigma = random_density(rng, 8)
    noise = NoiseModel(0.4, ReplaceWithFixedState(sigma))
    sch = RoundSchedule(max_rounds=20)
    f = OracleSpec(8, 6)  # block 2..6 holds the marked element at position 5
    exact = expected_block_queries(5, 3, noise, sch, True, marked_local=5)
    other = expected_block_queries(5, 3, noise, sch, True, marked_local=1)
    assert exact != pytest.approx(other, abs=1e-9)
    r = np.random.default_rng(3)
    costs = np.array([run_block_search(range(2, 7), f, noise, sch, r).total_queries for _ in range(4000)])
    assert abs(costs.mean() - exact) <= 3 * costs.std(ddof=1) / math.sqrt(costs.size)


def test_theorem1_bound_examples():
    assert theorem1_bound(100, 10, 0.0, 0.5) == pytest.approx(200 * (1.02 + math.sqrt(128)) * math.log(2), rel=1e-14)
    assert theorem1_bound(100, 10, 0.0, 0.5) == pytest.approx(1709.815, abs=1e-3)
    assert theorem1_bound(100, 10, 1.0, 0.5) == pytest.approx(19454.383, abs=1e-3)
    vals = [theorem1_bound(500, 12, p, 0.3) for p in np.linspace(0, 1, 11)]
    assert all(a < b for a, b in zip(vals, vals[1:]))
    with pytest.raises(InvalidArgument):
        theorem1_bound(99, 10, 0.0, 0.5)


def test_expected_queries_within_theorem1_bound():
    sch = RoundSchedule()
    for size in (100, 150, 403, 1096, 5000):
        for p in (0.0, 0.1, 0.2, 0.3):
            assert expected_block_queries(size, 14, NoiseModel(p), sch, True) <= theorem1_bound(size, 14, p, 0.5)


def test_mixed_initial_state_switch():
    sch = RoundSchedule(initial_state="mixed", max_rounds=5)
    for i in range(5):
        assert round_success_probability(150, 10, NoiseModel(0.0), i, sch, True) == pytest.approx(1 / 256)
        full = round_success_probability(20, 6, NoiseModel(0.0), i, sch, True, engine="full")
        assert full == pytest.approx(1 / 32, abs=1e-14)
