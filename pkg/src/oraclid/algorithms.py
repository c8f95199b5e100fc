"""Oracle identification algorithms and the classical adversary.

Every algorithm takes the known oracle set and a ``HiddenOracle`` and
returns a :class:`Transcript`. Bounded-error failures (a Grover miss, an
emptied candidate set, a tripped round ceiling) are outcomes recorded in the
transcript, not exceptions.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .oracle_set import (
    EmptyCandidatesError,
    OracleMatrix,
    best_split_column,
    column_flip,
    eliminate_by_value,
    eliminate_heavy_rows,
    half_weight_threshold,
    sensitivity,
)
from .quantum_sim import classical_query
from .search import bbht_search, bernstein_vazirani, grover_fixed, grover_iterations

GROVER_MISS = "grover-miss"
EMPTY_CANDIDATES = "empty-candidates"
BUDGET_CEILING = "budget-ceiling"
NO_PREFIX = "no-prefix"


@dataclass
class Constants:
    """Tunable constants. Every field can be overridden from the CLI with
    ``--const name=value``."""

    grover_budget: float = 4.5  # c in c*sqrt(N/K) per BBHT run
    bbht_lambda: float = 6 / 5
    repetition_floor: int = 1  # minimum log log M repetitions
    square_retries: int = 1  # extra BBHT runs in identify_square step 2
    av_repeats: int = 3  # d
    classical_slack: int = 8
    round_ceiling_factor: int = 2

    @classmethod
    def with_overrides(cls, overrides: dict | None = None) -> "Constants":
        base = cls()
        if not overrides:
            return base
        known = {f.name: f.type for f in fields(cls)}
        for name, value in overrides.items():
            if name not in known:
                raise KeyError(f"unknown constant {name!r}; known: {sorted(known)}")
            current = getattr(base, name)
            setattr(base, name, type(current)(value))
        return base


@dataclass
class Round:
    kind: str
    candidates: int
    threshold: int | None = None
    budget: int | None = None
    hit: bool | None = None
    column: int | None = None
    eliminated: int = 0
    queries: int = 0


@dataclass
class Transcript:
    algorithm: str
    n: int
    M: int
    rounds: list = field(default_factory=list)
    total_queries: int = 0
    outcome: int | None = None
    failure: str | None = None
    info: dict = field(default_factory=dict)

    @property
    def succeeded(self) -> bool:
        return self.outcome is not None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["outcome"] = self.outcome if self.outcome is not None else {"failure": self.failure}
        return d


def _finish(tr: Transcript, oracle, start: int, Z: OracleMatrix | None = None, failure=None):
    oracle.clear_mask()
    tr.total_queries = oracle.counter - start
    if failure is not None:
        tr.failure = failure
    elif Z is not None:
        tr.outcome = int(Z.row_ids[0])
    return tr


def repetitions(M: int, floor: int = 1) -> int:
    """ceil(log2 log2 M), at least ``floor``."""
    if M <= 2:
        return floor
    return max(floor, math.ceil(math.log2(math.log2(M))))


def _budget(c: float, N: int, K: int) -> int:
    return max(1, math.ceil(c * math.sqrt(N / K)))


def _classical_eliminate(Z: OracleMatrix, oracle, tr: Transcript, cap: int | None = None) -> OracleMatrix:
    """Query the most evenly splitting column until one row is left.

    ``Z`` must be in the same coordinates as the oracle's current answers.
    """
    spent = 0
    while Z.M > 1:
        if cap is not None and spent >= cap:
            raise _CeilingHit
        j = best_split_column(Z)
        bit = classical_query(oracle, j)
        before = Z.M
        Z = eliminate_by_value(Z, j, bit)
        spent += 1
        tr.rounds.append(Round("classical", before, column=j, hit=bool(bit), eliminated=before - Z.M, queries=1))
    return Z


class _CeilingHit(Exception):
    pass


def identify_general(S: OracleMatrix, oracle, rng, consts: Constants | None = None) -> Transcript:
    """Halving algorithm for arbitrary N x M sets.

    Each round: make the candidates 1-sensitive, take K as the largest weight
    reached by at least half of them, and run BBHT with budget
    ceil(c*sqrt(N/K)) up to ceil(log2 log2 M) times. A verified 1 at column j
    keeps the rows with a 1 there; no hit drops every row of weight >= K.
    Either way at most half the candidates survive.
    """
    c = consts or Constants()
    if S.M < 2:
        raise ValueError("identify_general needs at least two oracles")
    start = oracle.counter
    tr = Transcript("identify_general", S.n, S.M)
    reps = repetitions(S.M, c.repetition_floor)
    ceiling = c.round_ceiling_factor * math.ceil(math.log2(S.M))
    tr.info.update(repetitions=reps, round_ceiling=ceiling)
    Z = S
    while Z.M > 1:
        if sum(r.kind == "grover" for r in tr.rounds) >= ceiling:
            return _finish(tr, oracle, start, failure=BUDGET_CEILING)
        Zf, mask = column_flip(Z)
        oracle.set_mask(mask)
        K = half_weight_threshold(Zf)
        budget = _budget(c.grover_budget, S.N, K)
        q0 = oracle.counter
        found = None
        for _ in range(reps):
            out = bbht_search(oracle, S.n, budget, rng, c.bbht_lambda)
            if out.found is not None:
                found = out.found
                break
        before = Z.M
        try:
            if found is not None:
                Zf = eliminate_by_value(Zf, found, 1)
            else:
                Zf = eliminate_heavy_rows(Zf, K)
        except EmptyCandidatesError:
            tr.rounds.append(Round("grover", before, K, budget, found is not None, found, before, oracle.counter - q0))
            return _finish(tr, oracle, start, failure=EMPTY_CANDIDATES)
        if 2 * Zf.M > before:
            raise AssertionError(f"halving violated: {before} -> {Zf.M}")
        tr.rounds.append(
            Round("grover", before, K, budget, found is not None, found, before - Zf.M, oracle.counter - q0)
        )
        Z = Zf.xor_mask(mask)
    return _finish(tr, oracle, start, Z)


def identify_square(S: OracleMatrix, oracle, rng, consts: Constants | None = None) -> Transcript:
    """O(sqrt N) identification for N x N (or poly(N) x N) sets.

    Step 1 spends classical queries on columns with at least ceil(sqrt N)
    zeros and ones. Step 2 column-flips and runs BBHT (budget
    ceil(c*sqrt N), plus ``square_retries`` reruns). Step 3 finishes
    classically among the rows holding a 1 at the found column.

    A flipped candidate row can be all zeros, which no search can hit. On a
    miss the algorithm therefore keeps the all-zero row if one exists and
    reports ``grover-miss`` otherwise.
    """
    c = consts or Constants()
    start = oracle.counter
    tr = Transcript("identify_square", S.n, S.M)
    s = math.isqrt(S.N - 1) + 1 if S.N > 1 else 1  # ceil(sqrt N)
    Z = S
    step1 = 0
    while Z.M > 1:
        ones = Z.column_weights()
        zeros = Z.M - ones
        ok = (ones >= s) & (zeros >= s)
        if not ok.any():
            break
        balance = np.where(ok, np.minimum(ones, zeros), -1)
        j = int(np.argmax(balance))
        bit = classical_query(oracle, j)
        before = Z.M
        Z = eliminate_by_value(Z, j, bit)
        step1 += 1
        tr.rounds.append(Round("step1", before, column=j, hit=bool(bit), eliminated=before - Z.M, queries=1))
    tr.info["step1_queries"] = step1
    if Z.M == 1:
        tr.info["step3_queries"] = 0
        return _finish(tr, oracle, start, Z)

    Zf, mask = column_flip(Z)
    oracle.set_mask(mask)
    budget = _budget(c.grover_budget, S.N, 1)
    tr.info["grover_budget"] = budget
    found = None
    q0 = oracle.counter
    for _ in range(1 + c.square_retries):
        out = bbht_search(oracle, S.n, budget, rng, c.bbht_lambda)
        if out.found is not None:
            found = out.found
            break
    before = Zf.M
    if found is not None:
        Zf = eliminate_by_value(Zf, found, 1)
    else:
        zero_rows = Zf.row_weights() == 0
        if not zero_rows.any():
            tr.rounds.append(Round("grover", before, budget=budget, hit=False, queries=oracle.counter - q0))
            return _finish(tr, oracle, start, failure=GROVER_MISS)
        Zf = Zf.subset(zero_rows)
    tr.rounds.append(
        Round("grover", before, budget=budget, hit=found is not None, column=found,
              eliminated=before - Zf.M, queries=oracle.counter - q0)
    )
    q3 = oracle.counter
    Zf = _classical_eliminate(Zf, oracle, tr)
    tr.info["step3_queries"] = oracle.counter - q3
    return _finish(tr, oracle, start, Zf)


def identify_av(S: OracleMatrix, oracle, d: int | None, rng, consts: Constants | None = None,
                K: int | None = None) -> Transcript:
    """d independent BBHT runs, each hit pruning the candidates, then
    classical elimination capped at 2*ceil(log2 N) + slack queries.

    ``K`` defaults to the mean row weight of S, the natural estimate of the
    sampling parameter.
    """
    c = consts or Constants()
    d = c.av_repeats if d is None else d
    start = oracle.counter
    tr = Transcript("identify_av", S.n, S.M)
    if K is None:
        K = max(1, round(S.rows.sum() / S.M))
    budget = _budget(c.grover_budget, S.N, K)
    log_n = math.ceil(math.log2(S.N)) if S.N > 1 else 1
    cap = 2 * log_n + c.classical_slack
    tr.info.update(K=K, d=d, grover_budget=budget, classical_cap=cap)
    Zf, mask = column_flip(S)
    oracle.set_mask(mask)
    for _ in range(d):
        if Zf.M == 1:
            break
        q0 = oracle.counter
        out = bbht_search(oracle, S.n, budget, rng, c.bbht_lambda)
        before = Zf.M
        if out.found is not None:
            try:
                Zf = eliminate_by_value(Zf, out.found, 1)
            except EmptyCandidatesError:
                return _finish(tr, oracle, start, failure=EMPTY_CANDIDATES)
        tr.rounds.append(Round("grover", before, K, budget, out.found is not None, out.found,
                               before - Zf.M, oracle.counter - q0))
    tr.info["candidates_after_search"] = Zf.M
    tr.info["few_candidates_violated"] = Zf.M > 2 * log_n
    try:
        Zf = _classical_eliminate(Zf, oracle, tr, cap)
    except _CeilingHit:
        return _finish(tr, oracle, start, failure=BUDGET_CEILING)
    return _finish(tr, oracle, start, Zf)


def identify_balanced(S: OracleMatrix, oracle, rng, consts: Constants | None = None) -> Transcript:
    """One BBHT search, then at most K classical queries among the rows
    holding a 1 at the found column."""
    c = consts or Constants()
    start = oracle.counter
    tr = Transcript("identify_balanced", S.n, S.M)
    Zf, mask = column_flip(S)
    oracle.set_mask(mask)
    K = sensitivity(Zf).K
    budget = _budget(c.grover_budget, S.N, K)
    tr.info.update(K=K, grover_budget=budget)
    q0 = oracle.counter
    out = bbht_search(oracle, S.n, budget, rng, c.bbht_lambda)
    before = Zf.M
    if out.found is None:
        tr.rounds.append(Round("grover", before, K, budget, False, None, 0, oracle.counter - q0))
        return _finish(tr, oracle, start, failure=GROVER_MISS)
    Zf = eliminate_by_value(Zf, out.found, 1)
    tr.rounds.append(Round("grover", before, K, budget, True, out.found, before - Zf.M, oracle.counter - q0))
    tr.info["candidates_after_search"] = Zf.M
    q1 = oracle.counter
    Zf = _classical_eliminate(Zf, oracle, tr)
    tr.info["classical_queries"] = oracle.counter - q1
    return _finish(tr, oracle, start, Zf)


def identify_hybrid(n: int, k: int, oracle, rng, consts: Constants | None = None) -> Transcript:
    """Identify ``f_a`` in the hybrid set: Grover on the prefix, BV on the suffix.

    Phase 1 simulates only the 2**(n-k) inputs whose suffix is zero; among
    those exactly one (prefix(a), 0...0) answers 1, so a known-single-target
    Grover is rerun until verified or until the ceil(c*sqrt(N/K)) budget
    runs out. Phase 2 runs Bernstein-Vazirani on the 2**k inputs sharing that
    prefix; f_a there is 1 XOR (a_suffix . s), a global phase away from the
    BV promise, so one query returns the suffix.
    """
    c = consts or Constants()
    if not 0 <= k <= n or oracle.N != 1 << n:
        raise ValueError("oracle does not match the (n, k) hybrid shape")
    start = oracle.counter
    tr = Transcript("identify_hybrid", n, 1 << n)
    p_bits = n - k
    budget = _budget(c.grover_budget, 1 << n, 1 << k)
    tr.info["phase1_budget"] = budget
    prefix = 0
    q0 = oracle.counter
    if p_bits > 0:
        pinned = oracle.restrict(np.arange(1 << p_bits, dtype=np.int64) << k)
        r = None
        while r is None:
            if oracle.counter - q0 + grover_iterations(1 << p_bits, 1) + 1 > budget:
                break
            r = grover_fixed(pinned, p_bits, 1, rng).found
        tr.rounds.append(Round("phase1", 1 << p_bits, budget=budget, hit=r is not None, column=r,
                               queries=oracle.counter - q0))
        if r is None:
            tr.info.update(phase1_queries=oracle.counter - q0, phase2_queries=0)
            return _finish(tr, oracle, start, failure=GROVER_MISS)
        prefix = r
    tr.info["phase1_queries"] = oracle.counter - q0
    suffix = 0
    q1 = oracle.counter
    if k > 0:
        block = oracle.restrict((prefix << k) | np.arange(1 << k, dtype=np.int64))
        suffix = bernstein_vazirani(block, k, rng)
        tr.rounds.append(Round("phase2", 1 << k, column=suffix, queries=oracle.counter - q1))
    tr.info["phase2_queries"] = oracle.counter - q1
    tr.total_queries = oracle.counter - start
    tr.outcome = (prefix << k) | suffix
    return tr


def hybrid_probes(n: int, k: int):
    """Deterministic query strategy for the hybrid set, as a coroutine.

    Yields the next column to ask and expects the answer via ``send``. First
    scans prefixes p with the suffix pinned to zero until one answers 1,
    then asks (prefix, e_i) for each unit suffix e_i; the answer is 1 exactly
    when suffix bit i of a is 0. Returns ``a`` (or None if no prefix
    answered 1).
    """
    prefix = None
    for p in range(1 << (n - k)):
        if (yield p << k):
            prefix = p
            break
    if prefix is None:
        return None
    suffix = 0
    for i in range(k):
        answer = yield (prefix << k) | (1 << i)
        if not answer:
            suffix |= 1 << i
    return (prefix << k) | suffix


def classical_identify_hybrid(n: int, k: int, oracle) -> Transcript:
    if not 0 <= k <= n or oracle.N != 1 << n:
        raise ValueError("oracle does not match the (n, k) hybrid shape")
    start = oracle.counter
    tr = Transcript("classical_identify_hybrid", n, 1 << n)
    probes = hybrid_probes(n, k)
    try:
        x = next(probes)
        while True:
            bit = classical_query(oracle, x)
            tr.rounds.append(Round("classical", 0, column=int(x), hit=bool(bit), queries=1))
            x = probes.send(bit)
    except StopIteration as stop:
        a = stop.value
    tr.total_queries = oracle.counter - start
    if a is None:
        tr.failure = NO_PREFIX
    else:
        tr.outcome = a
    return tr


class AdversaryResponder:
    """Answers each query with the majority value over the still-consistent
    candidates, shrinking the candidate set to that majority.

    Rows are tracked by position in ``S``.
    """

    def __init__(self, S: OracleMatrix):
        self.S = S
        self.alive = np.ones(S.M, dtype=bool)
        self.answered: list[int] = []
        self.queries_seen: list[int] = []
        self.sizes: list[int] = [S.M]

    @property
    def size(self) -> int:
        return int(self.alive.sum())

    @property
    def candidates(self) -> list[int]:
        return self.S.row_ids[self.alive].tolist()

    @property
    def counter(self) -> int:
        return len(self.answered)

    @property
    def N(self) -> int:
        return self.S.N

    def respond(self, x: int) -> int:
        if not 0 <= x < self.S.N:
            raise ValueError(f"query index {x} out of range")
        col = self.S.rows[:, x]
        ones = int(col[self.alive].sum())
        zeros = self.size - ones
        answer = 0 if zeros >= ones else 1
        self.alive &= col == answer
        self.answered.append(answer)
        self.queries_seen.append(int(x))
        self.sizes.append(self.size)
        return answer

    query = respond


def adversary_rounds(N: int, K: int) -> int:
    """floor(N/K) + floor(log2 K) - 3: queries the adversary can always survive."""
    return N // K + (K.bit_length() - 1) - 3
