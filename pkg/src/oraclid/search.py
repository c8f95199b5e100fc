"""Grover with a known target count, the BBHT unknown-count search, and
Bernstein-Vazirani, all running on the state-vector simulator."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .quantum_sim import (
    StateVector,
    apply_grover_iterations,
    apply_hadamard_all,
    apply_phase_oracle,
    classical_query,
    init_uniform,
    measure,
)

BBHT_LAMBDA = 6 / 5


@dataclass
class SearchOutcome:
    """Result of a search. ``found`` is set only after a classical check
    confirmed the oracle answers 1 there; that check is in ``queries_used``.

    ``hit_probabilities`` is simulator-side bookkeeping: the probability mass
    on marked inputs just before each measurement.
    """

    found: int | None
    queries_used: int
    iterations_log: list = field(default_factory=list)
    hit_probabilities: list = field(default_factory=list)


def grover_iterations(N: int, t: int) -> int:
    """round(pi/4 * sqrt(N/t) - 1/2) with halves rounded up, never negative."""
    return max(0, math.floor(math.pi / 4 * math.sqrt(N / t)))


def grover_state(oracle, rounds: int) -> StateVector:
    state = init_uniform(oracle.n)
    apply_grover_iterations(state, oracle, rounds)
    return state


def _marked_mass(state, oracle) -> float:
    return float(state.probabilities()[oracle.values().astype(bool)].sum())


def _attempt(oracle, rounds, rng, out: SearchOutcome) -> int | None:
    state = grover_state(oracle, rounds)
    out.iterations_log.append(rounds)
    out.hit_probabilities.append(_marked_mass(state, oracle))
    x = measure(state, rng)
    out.queries_used += rounds + 1
    return x if classical_query(oracle, x) == 1 else None


def grover_fixed(oracle, n: int, t: int, rng) -> SearchOutcome:
    """One Grover run tuned for ``t`` marked inputs, then measure and verify."""
    N = 1 << n
    if oracle.N != N:
        raise ValueError(f"oracle has N={oracle.N}, expected {N}")
    if not 1 <= t <= N:
        raise ValueError(f"presumed target count must be in [1, {N}]")
    out = SearchOutcome(found=None, queries_used=0)
    out.found = _attempt(oracle, grover_iterations(N, t), rng, out)
    return out


def bbht_search(oracle, n: int, max_queries: int, rng, lam: float = BBHT_LAMBDA) -> SearchOutcome:
    """Search with an unknown number of marked inputs under a hard query budget.

    Iteration counts are drawn uniformly from [0, ceil(m)) with m growing by
    ``lam`` after each miss, capped at sqrt(N). When the draw would overrun
    the budget it is clipped to what is left, so ``queries_used`` never
    exceeds ``max_queries``.
    """
    N = 1 << n
    if oracle.N != N:
        raise ValueError(f"oracle has N={oracle.N}, expected {N}")
    if max_queries < 1:
        raise ValueError("max_queries must be at least 1")
    out = SearchOutcome(found=None, queries_used=0)
    m = 1.0
    cap = math.sqrt(N)
    while out.queries_used < max_queries:
        rounds = int(rng.integers(0, math.ceil(m)))
        rounds = min(rounds, max_queries - out.queries_used - 1)
        x = _attempt(oracle, rounds, rng, out)
        if x is not None:
            out.found = x
            break
        m = min(lam * m, cap)
    return out


def bernstein_vazirani_state(oracle) -> StateVector:
    """H, one phase-oracle call, H. On ``f(x) = a.x`` this is exactly |a>."""
    state = init_uniform(oracle.n)
    apply_phase_oracle(state, oracle)
    apply_hadamard_all(state)
    return state


def bernstein_vazirani(oracle, n: int, rng=None) -> int:
    if oracle.N != 1 << n:
        raise ValueError(f"oracle has N={oracle.N}, expected {1 << n}")
    if rng is None:
        rng = np.random.default_rng(0)
    return measure(bernstein_vazirani_state(oracle), rng)
