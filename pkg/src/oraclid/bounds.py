"""Adversary lower bounds evaluated on concrete oracle matrices."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .oracle_set import OracleMatrix, OracleSetError, column_flip, sensitivity

THRESHOLD_MAX_N = 16
THRESHOLD_MAX_K = 3


class InvalidRelationError(ValueError):
    pass


@dataclass(frozen=True)
class AdversaryRelation:
    """Disjoint row-id sets X, Y and pairs R within X x Y."""

    X: tuple
    Y: tuple
    pairs: tuple

    def __post_init__(self):
        X, Y = set(self.X), set(self.Y)
        if X & Y:
            raise InvalidRelationError("X and Y must be disjoint")
        for a, b in self.pairs:
            if a not in X or b not in Y:
                raise InvalidRelationError(f"pair ({a}, {b}) is not in X x Y")

    @classmethod
    def complete(cls, X, Y) -> "AdversaryRelation":
        X, Y = tuple(int(x) for x in X), tuple(int(y) for y in Y)
        return cls(X, Y, tuple(itertools.product(X, Y)))


@dataclass
class BoundReport:
    kind: str
    value: float
    ingredients: dict = field(default_factory=dict)
    witness: tuple | None = None

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "value": self.value,
            "ingredients": self.ingredients,
            "witness": list(self.witness) if self.witness is not None else None,
        }


def simple_adversary_bound(S: OracleMatrix) -> BoundReport:
    """sqrt(M / #(S')) with S' the column-flipped (1-sensitive) S."""
    if S.M < 2:
        raise ValueError("need at least two oracles")
    flipped, mask = column_flip(S)
    K = sensitivity(flipped).K
    return BoundReport("simple", math.sqrt(S.M / K), {"M": S.M, "K": K, "flipped_columns": int(mask.bits.sum())})


def ambainis_bound(S: OracleMatrix, rel: AdversaryRelation) -> BoundReport:
    """sqrt(m*m'/l_max) with every ingredient counted exhaustively.

    m and m' are the smallest relation degrees over X and Y. For a pair
    (a, b) and a position i where they differ, l_{a,i} counts partners of a
    differing from a at i (and symmetrically l_{b,i}); l_max is the largest
    product l_{a,i} * l_{b,i}.
    """
    if not rel.pairs:
        raise InvalidRelationError("relation is empty")
    pos = {int(r): p for p, r in enumerate(S.row_ids)}
    try:
        xi = {a: i for i, a in enumerate(rel.X)}
        yi = {b: i for i, b in enumerate(rel.Y)}
        rows_x = S.rows[[pos[a] for a in rel.X]].astype(np.int64)
        rows_y = S.rows[[pos[b] for b in rel.Y]].astype(np.int64)
    except KeyError as exc:
        raise InvalidRelationError(f"row id {exc.args[0]} not in matrix") from None
    pa = np.array([xi[a] for a, _ in rel.pairs], dtype=np.int64)
    pb = np.array([yi[b] for _, b in rel.pairs], dtype=np.int64)
    deg_x = np.bincount(pa, minlength=len(rel.X))
    deg_y = np.bincount(pb, minlength=len(rel.Y))
    if (deg_x == 0).any() or (deg_y == 0).any():
        raise InvalidRelationError("every row of X and Y must appear in at least one pair")
    m, m2 = int(deg_x.min()), int(deg_y.min())

    diff = rows_x[pa] != rows_y[pb]  # |R| x N
    if not diff.any():
        raise InvalidRelationError("no pair differs anywhere")
    l_x = np.zeros((len(rel.X), S.N), dtype=np.int64)
    l_y = np.zeros((len(rel.Y), S.N), dtype=np.int64)
    np.add.at(l_x, pa, diff)
    np.add.at(l_y, pb, diff)
    prod = np.where(diff, l_x[pa] * l_y[pb], 0)
    p, i = np.unravel_index(int(np.argmax(prod)), prod.shape)
    l_max = int(prod[p, i])
    witness = (rel.pairs[p][0], rel.pairs[p][1], int(i))
    value = math.sqrt(m * m2 / l_max)
    return BoundReport("ambainis", value, {"m": m, "m_prime": m2, "l_max": l_max}, witness)


def halves_relation(S: OracleMatrix) -> AdversaryRelation:
    """X = first half of the rows, Y = the rest, R = X x Y."""
    half = S.M // 2
    return AdversaryRelation.complete(S.row_ids[:half], S.row_ids[half:])


def _weight_rows(N: int, w: int) -> np.ndarray:
    rows = np.zeros((math.comb(N, w), N), dtype=np.uint8)
    for r, ones in enumerate(itertools.combinations(range(N), w)):
        rows[r, list(ones)] = 1
    return rows


def threshold_instance_bound(N: int, K: int):
    """All weight-K rows (X) and weight-(K+1) rows (Y), related when they
    differ in one position. Exhaustive counting must give m = N-K,
    m' = K+1 and l_max = 1, i.e. a bound of sqrt((N-K)(K+1)).
    """
    if N < 2 or N & (N - 1) or N > THRESHOLD_MAX_N:
        raise OracleSetError(f"N must be a power of two in [2, {THRESHOLD_MAX_N}]")
    if not 0 <= K <= THRESHOLD_MAX_K or K + 1 > N:
        raise OracleSetError(f"K must be in [0, min({THRESHOLD_MAX_K}, N-1)]")
    xs = _weight_rows(N, K)
    ys = _weight_rows(N, K + 1)
    S = OracleMatrix(N.bit_length() - 1, np.vstack([xs, ys]), meta={"family": "threshold", "K": K})
    nx = xs.shape[0]
    # y covers x and differs in one spot <=> x & ~y == 0 (weights differ by one)
    covers = (xs.astype(np.int64) @ ys.T.astype(np.int64)) == K
    ii, jj = np.nonzero(covers)
    rel = AdversaryRelation(
        tuple(range(nx)), tuple(range(nx, nx + ys.shape[0])), tuple(zip(ii.tolist(), (jj + nx).tolist()))
    )
    report = ambainis_bound(S, rel)
    expected = {"m": N - K, "m_prime": K + 1, "l_max": 1}
    got = {k: report.ingredients[k] for k in expected}
    if got != expected:
        raise AssertionError(f"threshold instance ingredients {got} != {expected}")
    return S, rel, report
