import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oraclid.bounds import (
    AdversaryRelation,
    InvalidRelationError,
    ambainis_bound,
    halves_relation,
    simple_adversary_bound,
    threshold_instance_bound,
)
from oraclid.oracle_set import (
    OracleMatrix,
    OracleSetError,
    column_flip,
    make_bv,
    make_grover,
    make_hybrid,
    sample_distinct,
)


def brute_ambainis(S, X, Y, R):
    """Loop-by-loop evaluation of m, m', l_max."""
    f = {int(r): S.rows[p].tolist() for p, r in enumerate(S.row_ids)}
    m = min(sum(1 for a, b in R if a == x) for x in X)
    m2 = min(sum(1 for a, b in R if b == y) for y in Y)
    l_max = 0
    for a, b in R:
        for i in range(S.N):
            if f[a][i] == f[b][i]:
                continue
            la = sum(1 for a2, b2 in R if a2 == a and f[a][i] != f[b2][i])
            lb = sum(1 for a2, b2 in R if b2 == b and f[a2][i] != f[b][i])
            l_max = max(l_max, la * lb)
    return m, m2, l_max


class TestSimple:
    def test_grover(self):
        assert simple_adversary_bound(make_grover(4)).value == 4.0

    def test_bv(self):
        r = simple_adversary_bound(make_bv(4))
        assert r.ingredients["K"] == 8
        assert abs(r.value - math.sqrt(2)) < 1e-12

    def test_hybrid(self):
        S = make_hybrid(4, 2)
        K = int(column_flip(S)[0].column_weights().max())
        assert K == 4
        assert simple_adversary_bound(S).value == pytest.approx(math.sqrt(16 / K), abs=1e-12)

    def test_invariant_under_permutation_and_flip(self):
        rng = np.random.default_rng(0)
        for seed in range(10):
            S = sample_distinct(4, 24, seed=seed)
            base = simple_adversary_bound(S).value
            perm = OracleMatrix(S.n, S.rows[:, rng.permutation(S.N)])
            mask = rng.integers(0, 2, S.N).astype(np.uint8)
            assert simple_adversary_bound(perm).value == base
            assert simple_adversary_bound(S.xor_mask(mask)).value == base


class TestAmbainis:
    def test_grover2_star(self):
        S = make_grover(2)
        rel = AdversaryRelation.complete([0], [1, 2, 3])
        r = ambainis_bound(S, rel)
        assert brute_ambainis(S, rel.X, rel.Y, rel.pairs) == (3, 1, 3)
        assert (r.ingredients["m"], r.ingredients["m_prime"], r.ingredients["l_max"]) == (3, 1, 3)
        assert r.value == pytest.approx(1.0, abs=1e-12)
        a, b, i = r.witness
        assert i == 0 and a == 0

    @settings(max_examples=40, deadline=None)
    @given(n=st.integers(1, 3), M=st.integers(2, 10), seed=st.integers(0, 2**16), data=st.data())
    def test_matches_brute_force(self, n, M, seed, data):
        M = min(M, 2 ** (1 << n))
        S = sample_distinct(n, M, seed=seed)
        cut = data.draw(st.integers(1, S.M - 1))
        X, Y = list(range(cut)), list(range(cut, S.M))
        full = list(itertools.product(X, Y))
        keep = data.draw(st.lists(st.booleans(), min_size=len(full), max_size=len(full)))
        R = [p for p, k in zip(full, keep) if k]
        if not R or {a for a, _ in R} != set(X) or {b for _, b in R} != set(Y):
            R = full
        r = ambainis_bound(S, AdversaryRelation(tuple(X), tuple(Y), tuple(R)))
        m, m2, l_max = brute_ambainis(S, X, Y, R)
        assert (r.ingredients["m"], r.ingredients["m_prime"], r.ingredients["l_max"]) == (m, m2, l_max)
        assert abs(r.value * math.sqrt(l_max) - math.sqrt(m * m2)) < 1e-9

    def test_halves_closed_form_and_consistency(self):
        gens = [make_grover(n) for n in range(1, 7)] + [make_bv(n) for n in range(1, 7)]
        gens += [make_hybrid(n, k) for n in range(1, 7) for k in range(n + 1)]
        gens += [sample_distinct(n, 2 * (1 << n), seed=n) for n in range(1, 7)]
        for S in gens:
            S1, _ = column_flip(S)
            if S1.M % 2:
                continue
            r = ambainis_bound(S1, halves_relation(S1))
            half = S1.M // 2
            Kj = S1.column_weights()
            delta = S1.rows[half:].sum(axis=0)
            closed = np.maximum(delta * (half - Kj + delta), (half - delta) * (Kj - delta))
            assert r.ingredients["l_max"] == int(closed.max())
            assert r.value >= simple_adversary_bound(S).value / math.sqrt(2) - 1e-12

    def test_invalid(self):
        S = make_grover(2)
        with pytest.raises(InvalidRelationError):
            AdversaryRelation((0, 1), (1, 2), ())
        with pytest.raises(InvalidRelationError):
            AdversaryRelation((0,), (1,), ((0, 2),))
        with pytest.raises(InvalidRelationError):
            ambainis_bound(S, AdversaryRelation((0, 1), (2,), ((0, 2),)))
        with pytest.raises(InvalidRelationError):
            ambainis_bound(S, AdversaryRelation((0,), (2,), ()))


class TestThreshold:
    def test_n4_k1(self):
        S, rel, r = threshold_instance_bound(4, 1)
        assert S.M == 4 + 6
        assert (r.ingredients["m"], r.ingredients["m_prime"], r.ingredients["l_max"]) == (3, 2, 1)
        assert abs(r.value - math.sqrt(6)) < 1e-12

    def test_n8_k1(self):
        assert abs(threshold_instance_bound(8, 1)[2].value - math.sqrt(14)) < 1e-12

    @pytest.mark.parametrize("N", [2, 4, 8, 16])
    @pytest.mark.parametrize("K", [0, 1, 2, 3])
    def test_ingredients(self, N, K):
        if K + 1 > N:
            pytest.skip("no weight-(K+1) rows")
        S, rel, r = threshold_instance_bound(N, K)
        assert S.M == math.comb(N, K) + math.comb(N, K + 1)
        assert r.ingredients["l_max"] == 1
        assert r.value == pytest.approx(math.sqrt((N - K) * (K + 1)), abs=1e-12)
        if N <= 4:
            assert brute_ambainis(S, rel.X, rel.Y, rel.pairs) == (N - K, K + 1, 1)

    @pytest.mark.parametrize("N, K", [(32, 1), (8, 4), (6, 1)])
    def test_guard(self, N, K):
        with pytest.raises(OracleSetError):
            threshold_instance_bound(N, K)
