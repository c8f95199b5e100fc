import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oraclid.algorithms import (
    AdversaryResponder,
    Constants,
    adversary_rounds,
    classical_identify_hybrid,
    hybrid_probes,
    identify_av,
    identify_balanced,
    identify_general,
    identify_hybrid,
    identify_square,
    repetitions,
)
from oraclid.harness import trial_rng
from oraclid.oracle_set import (
    OracleMatrix,
    make_grover,
    make_hybrid,
    sample_av,
    sample_balanced,
    sample_distinct,
)
from oraclid.quantum_sim import HiddenOracle


def runs(fn, S, trials, seed, **kw):
    """(transcript, hidden id) for ``trials`` seeded runs over hidden rows chosen by a seeded rng."""
    pick = np.random.default_rng(seed)
    out = []
    for t in range(trials):
        hidden = int(pick.integers(S.M))
        oracle = HiddenOracle(S.rows[hidden])
        tr = fn(S, oracle, rng=trial_rng(seed, hidden, t), **kw)
        assert tr.total_queries == oracle.counter
        assert not oracle.mask.any()
        out.append((tr, hidden))
    return out


def success_rate(results):
    return sum(tr.outcome == h for tr, h in results) / len(results)


def test_repetitions():
    assert repetitions(2) == 1 and repetitions(4) == 1
    assert repetitions(16) == 2 and repetitions(4096) == 4
    assert repetitions(4, floor=3) == 3


def test_constants_overrides():
    c = Constants.with_overrides({"grover_budget": "3.5", "av_repeats": "2"})
    assert c.grover_budget == 3.5 and c.av_repeats == 2
    with pytest.raises(KeyError):
        Constants.with_overrides({"nope": 1})


class TestIdentifyGeneral:
    def test_grover_success(self):
        res = runs(identify_general, make_grover(6), 200, seed=11)
        assert success_rate(res) >= 2 / 3

    def test_halving_and_round_count(self):
        S = sample_distinct(5, 300, seed=3)
        for tr, _ in runs(identify_general, S, 60, seed=12):
            sizes = [r.candidates for r in tr.rounds] + ([1] if tr.succeeded else [])
            for a, b in zip(sizes, sizes[1:]):
                assert 2 * b <= a
            assert len(tr.rounds) <= math.ceil(math.log2(S.M)) + 1

    def test_two_rows(self):
        rows = np.zeros((2, 8), dtype=np.uint8)
        rows[0, 3] = 1
        S = OracleMatrix(3, rows)
        for tr, h in runs(identify_general, S, 40, seed=13):
            assert len(tr.rounds) <= 1 and tr.outcome == h

    def test_requires_two(self):
        with pytest.raises(ValueError):
            identify_general(make_grover(2).subset(np.array([True, False, False, False])),
                             HiddenOracle(make_grover(2).rows[0]), np.random.default_rng(0))


class TestIdentifySquare:
    def test_grover_n4(self):
        res = runs(identify_square, make_grover(4), 200, seed=21)
        assert success_rate(res) >= 2 / 3
        assert all(tr.total_queries <= 12 * 4 for tr, _ in res)

    @pytest.mark.parametrize("n", [4, 6, 8])
    def test_step_bounds(self, n):
        S = sample_distinct(n, 1 << n, seed=n)
        s = math.isqrt((1 << n) - 1) + 1
        res = runs(identify_square, S, 60, seed=22)
        for tr, _ in res:
            assert tr.info["step1_queries"] <= s
            assert tr.info.get("step3_queries", 0) <= s
        assert success_rate(res) >= 2 / 3

    def test_all_zero_flipped_row(self):
        # the hidden row is the majority everywhere, so after flipping it is all zeros
        rows = np.array([[0, 0, 0, 0], [1, 0, 0, 0], [0, 1, 0, 0]], dtype=np.uint8)
        S = OracleMatrix(2, rows)
        for tr, h in runs(identify_square, S, 30, seed=23):
            assert tr.outcome == h


class TestIdentifyAV:
    def test_d0_classical(self):
        S = sample_av(5, 4, seed=1)
        for tr, h in runs(identify_av, S, 30, seed=31, d=0):
            assert all(r.kind == "classical" for r in tr.rounds)
            assert tr.outcome == h

    def test_budget_echo(self):
        S = sample_av(8, 16, seed=1)
        c = Constants()
        for tr, _ in runs(identify_av, S, 20, seed=32, d=3, K=16):
            want = math.ceil(c.grover_budget * math.sqrt(256 / 16))
            assert tr.info["grover_budget"] == want
            assert all(r.budget == want for r in tr.rounds if r.kind == "grover")
            assert all(r.queries <= want for r in tr.rounds if r.kind == "grover")


class TestIdentifyBalanced:
    def test_candidates_after_hit(self):
        S = sample_balanced(6, 4, seed=7)
        for tr, _ in runs(identify_balanced, S, 60, seed=41):
            if tr.rounds[0].hit:
                assert tr.info["candidates_after_search"] <= 4
                assert tr.info["classical_queries"] <= 4

    def test_k1_is_grover(self):
        S = sample_balanced(5, 1, seed=3)
        res = runs(identify_balanced, S, 60, seed=42)
        assert all(tr.info.get("classical_queries", 0) == 0 for tr, _ in res)
        assert success_rate(res) >= 2 / 3


class TestHybrid:
    def test_example(self):
        S = make_hybrid(4, 2)
        a = 0b1011
        o = HiddenOracle(S.rows[a])
        tr = identify_hybrid(4, 2, o, np.random.default_rng(5))
        assert tr.outcome == a
        assert tr.rounds[0].column == 0b10
        assert tr.rounds[1].column == 0b11
        assert tr.info["phase2_queries"] == 1
        assert tr.total_queries <= math.ceil(4.5 * math.sqrt(16 / 4)) + 1

    @pytest.mark.parametrize("n", [1, 3, 5])
    def test_k_equals_n(self, n):
        S = make_hybrid(n, n)
        for a in range(S.N):
            o = HiddenOracle(S.rows[a])
            tr = identify_hybrid(n, n, o, np.random.default_rng(a))
            assert tr.outcome == a and tr.total_queries == 1

    def test_k0_pure_grover(self):
        S = make_hybrid(5, 0)
        res = runs(lambda S, o, rng: identify_hybrid(5, 0, o, rng), S, 50, seed=51)
        assert success_rate(res) >= 2 / 3
        assert all(tr.info["phase2_queries"] == 0 for tr, _ in res)


class TestClassicalHybrid:
    def test_example(self):
        o = HiddenOracle(make_hybrid(2, 1).rows[0b11])
        tr = classical_identify_hybrid(2, 1, o)
        assert [r.column for r in tr.rounds] == [0b00, 0b10, 0b11]
        assert [int(r.hit) for r in tr.rounds] == [0, 1, 0]
        assert tr.outcome == 0b11 and tr.total_queries == 3

    def test_worst_case_n6_k3(self):
        S = make_hybrid(6, 3)
        counts = []
        for a in range(64):
            tr = classical_identify_hybrid(6, 3, HiddenOracle(S.rows[a]))
            assert tr.outcome == a
            counts.append(tr.total_queries)
        assert max(counts) == 2**3 + 3

    def test_k0(self):
        S = make_hybrid(4, 0)
        for a in range(16):
            tr = classical_identify_hybrid(4, 0, HiddenOracle(S.rows[a]))
            assert tr.outcome == a and tr.total_queries <= 16


class TestAdversary:
    def test_grover2_query(self):
        adv = AdversaryResponder(make_grover(2))
        assert adv.respond(2) == 0
        assert adv.candidates == [0, 1, 3]
        assert adv.respond(2) == 0
        assert adv.candidates == [0, 1, 3]

    def test_rounds_formula(self):
        assert adversary_rounds(16, 1) == 13
        assert adversary_rounds(16, 4) == 3

    @settings(max_examples=40, deadline=None)
    @given(n=st.integers(2, 5), seed=st.integers(0, 2**16), data=st.data())
    def test_shrink_bounds(self, n, seed, data):
        kind = data.draw(st.sampled_from(["grover", "hybrid", "balanced", "random"]))
        if kind == "grover":
            S = make_grover(n)
        elif kind == "hybrid":
            S = make_hybrid(n, data.draw(st.integers(0, n)))
        elif kind == "balanced":
            S = sample_balanced(n, data.draw(st.integers(1, (1 << n) // 2)), seed=seed)
        else:
            S = sample_distinct(n, 1 << n, seed=seed)
        K = int(S.column_weights().max())
        adv = AdversaryResponder(S)
        queries = data.draw(st.lists(st.integers(0, S.N - 1), min_size=1, max_size=3 * S.N))
        for x in queries:
            before = adv.size
            alive = adv.alive.copy()
            adv.respond(x)
            assert adv.size >= before - K
            col = S.rows[alive, x]
            if 0 < col.sum() < before:
                assert adv.size >= math.ceil(before / 2)
            assert not (adv.alive & ~alive).any()

    def test_probe_coroutine_with_adversary(self):
        S = make_grover(4)
        adv = AdversaryResponder(S)
        probes = hybrid_probes(4, 0)
        x = next(probes)
        for _ in range(adversary_rounds(16, 1) - 1):
            x = probes.send(adv.respond(x))
        adv.respond(x)
        assert adv.size >= 2
