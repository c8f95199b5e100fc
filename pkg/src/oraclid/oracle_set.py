"""Oracle sets as Boolean matrices: generators, column flip, pruning, file I/O.

Row ``i`` of a matrix is oracle ``f_i``; column ``j`` holds ``f_i(j)``. Bit
``x_1`` of an input is the most significant bit of the column index, so the
"first n-k bits" of a column are ``x >> k``.
"""

from __future__ import annotations

import io
import math
import os
import re
from dataclasses import dataclass, field

import numpy as np

MAX_QUBITS = 20
_HEADER = re.compile(r"^OIP v1 n=(\d+) M=(\d+)$")


class OracleSetError(ValueError):
    """Invalid parameters or a matrix that breaks the distinct-row invariant."""


class EmptyCandidatesError(OracleSetError):
    """An elimination removed every row.

    Identification algorithms treat this as their bounded-error failure
    branch: the hidden oracle was dropped by an earlier wrong decision.
    """


class MatrixFormatError(OracleSetError):
    pass


def _as_rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _check_n(n, low=1):
    if not isinstance(n, (int, np.integer)) or not low <= n <= MAX_QUBITS:
        raise OracleSetError(f"qubit count must be in [{low}, {MAX_QUBITS}], got {n!r}")


def _duplicate_rows(rows: np.ndarray) -> np.ndarray:
    """Positions of rows equal to an earlier row."""
    if rows.shape[0] < 2:
        return np.zeros(0, dtype=np.int64)
    packed = np.packbits(rows, axis=1)
    keys = [r.tobytes() for r in packed]
    seen = set()
    dup = []
    for i, key in enumerate(keys):
        if key in seen:
            dup.append(i)
        else:
            seen.add(key)
    return np.asarray(dup, dtype=np.int64)


@dataclass(frozen=True, eq=False)
class OracleMatrix:
    """An N x M oracle set stored as an (M, N) uint8 array.

    ``row_ids`` keep the original row index of each surviving row so that
    candidate sets can be traced back to the matrix they were pruned from.
    ``meta`` carries generator parameters (e.g. ``{"family": "hybrid", "k": 2}``).
    """

    n: int
    rows: np.ndarray
    row_ids: np.ndarray = None
    meta: dict = field(default_factory=dict)
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        rows = np.ascontiguousarray(self.rows, dtype=np.uint8)
        if rows.ndim != 2:
            raise OracleSetError("rows must be a 2-D array")
        if not 0 <= self.n <= MAX_QUBITS:
            raise OracleSetError(f"n must be in [0, {MAX_QUBITS}]")
        if rows.shape[1] != 1 << self.n:
            raise OracleSetError(f"row length {rows.shape[1]} != N = {1 << self.n}")
        if rows.shape[0] < 1:
            raise EmptyCandidatesError("oracle matrix has no rows")
        ids = self.row_ids
        ids = np.arange(rows.shape[0], dtype=np.int64) if ids is None else np.asarray(ids, dtype=np.int64)
        if ids.shape != (rows.shape[0],):
            raise OracleSetError("row_ids length must equal the row count")
        if self.check:
            if rows.max(initial=0) > 1:
                raise OracleSetError("matrix entries must be 0 or 1")
            if np.unique(ids).size != ids.size:
                raise OracleSetError("row_ids must be unique")
            dup = _duplicate_rows(rows)
            if dup.size:
                raise OracleSetError(f"duplicate rows at positions {dup[:5].tolist()}")
        rows.setflags(write=False)
        ids.setflags(write=False)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "row_ids", ids)

    @property
    def N(self) -> int:
        return self.rows.shape[1]

    @property
    def M(self) -> int:
        return self.rows.shape[0]

    def row_weights(self) -> np.ndarray:
        return self.rows.sum(axis=1, dtype=np.int64)

    def column_weights(self) -> np.ndarray:
        return self.rows.sum(axis=0, dtype=np.int64)

    def position_of(self, row_id: int) -> int:
        hits = np.flatnonzero(self.row_ids == row_id)
        if hits.size == 0:
            raise KeyError(row_id)
        return int(hits[0])

    def row_by_id(self, row_id: int) -> np.ndarray:
        return self.rows[self.position_of(row_id)]

    def subset(self, keep: np.ndarray) -> "OracleMatrix":
        """Rows selected by a boolean mask, order and ids preserved."""
        if not keep.any():
            raise EmptyCandidatesError("no candidate rows remain")
        return OracleMatrix(self.n, self.rows[keep], self.row_ids[keep], self.meta, check=False)

    def xor_mask(self, mask) -> "OracleMatrix":
        mask = np.asarray(getattr(mask, "bits", mask), dtype=np.uint8)
        return OracleMatrix(self.n, self.rows ^ mask, self.row_ids, self.meta, check=False)

    def __eq__(self, other):
        if not isinstance(other, OracleMatrix):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.rows, other.rows)
            and np.array_equal(self.row_ids, other.row_ids)
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class FlipMask:
    bits: np.ndarray

    def __post_init__(self):
        bits = np.ascontiguousarray(self.bits, dtype=np.uint8)
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    @property
    def N(self):
        return self.bits.shape[0]

    def any(self) -> bool:
        return bool(self.bits.any())


@dataclass(frozen=True)
class ColumnStats:
    """Per-column ones counts; ``K`` is the largest of them (#(S))."""

    counts: np.ndarray
    K: int
    M: int
    subset_counts: np.ndarray | None = None

    @property
    def one_sensitive(self) -> bool:
        return bool((2 * self.counts <= self.M).all())


# --- generators ---------------------------------------------------------------


def _popcount_parity(v: np.ndarray) -> np.ndarray:
    v = v.copy()
    parity = np.zeros_like(v)
    while v.any():
        parity ^= v & 1
        v >>= 1
    return parity


def make_grover(n: int) -> OracleMatrix:
    """Identity matrix: ``f_i(j) = 1`` iff ``i == j``."""
    _check_n(n)
    N = 1 << n
    return OracleMatrix(n, np.eye(N, dtype=np.uint8), meta={"family": "grover", "K": 1}, check=False)


def make_bv(n: int) -> OracleMatrix:
    """Bernstein-Vazirani set: ``f_i(j) = i . j mod 2``."""
    _check_n(n)
    N = 1 << n
    idx = np.arange(N, dtype=np.int64)
    rows = _popcount_parity(idx[:, None] & idx[None, :]).astype(np.uint8)
    return OracleMatrix(n, rows, meta={"family": "bv"}, check=False)


def make_hybrid(n: int, k: int) -> OracleMatrix:
    """Grover over the first ``n-k`` bits, Bernstein-Vazirani-style over the last ``k``.

    ``f_a(x) = 1`` iff prefixes of ``a`` and ``x`` agree and the suffix inner
    product is even. Every column with a zero suffix holds ``2**k`` ones, so
    ``#(S) = K = 2**k``.
    """
    _check_n(n)
    if not 0 <= k <= n:
        raise OracleSetError(f"suffix length k must be in [0, {n}], got {k}")
    N = 1 << n
    idx = np.arange(N, dtype=np.int64)
    low = (1 << k) - 1
    a = idx[:, None]
    x = idx[None, :]
    same_prefix = (a >> k) == (x >> k)
    even = _popcount_parity((a & low) & (x & low)) == 0
    rows = (same_prefix & even).astype(np.uint8)
    return OracleMatrix(n, rows, meta={"family": "hybrid", "k": k, "K": 1 << k}, check=False)


def sample_av(n: int, K: int, seed=None, retries: int = 100) -> OracleMatrix:
    """N x N matrix with i.i.d. entries equal to 1 with probability K/N.

    Duplicate rows are redrawn (up to ``retries`` passes) so the result is a
    valid oracle set.
    """
    _check_n(n)
    N = 1 << n
    if not 1 <= K <= N:
        raise OracleSetError(f"K must be in [1, {N}], got {K}")
    rng = _as_rng(seed)
    p = K / N
    rows = (rng.random((N, N)) < p).astype(np.uint8)
    for _ in range(retries):
        dup = _duplicate_rows(rows)
        if dup.size == 0:
            return OracleMatrix(n, rows, meta={"family": "av", "K": K}, check=False)
        rows[dup] = (rng.random((dup.size, N)) < p).astype(np.uint8)
    raise OracleSetError(f"could not draw {N} distinct rows with K={K} after {retries} retries")


def _random_perfect_matching(free: np.ndarray, rng) -> np.ndarray:
    """A perfect matching of the bipartite graph ``free`` (rows x cols).

    Rows and columns are shuffled before running Hopcroft-Karp so repeated
    calls give different matchings.
    """
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import maximum_bipartite_matching

    N = free.shape[0]
    pr = rng.permutation(N)
    pc = rng.permutation(N)
    graph = csr_matrix(free[np.ix_(pr, pc)].astype(np.int8))
    match = maximum_bipartite_matching(graph, perm_type="column")
    if (match < 0).any():
        raise OracleSetError("no perfect matching in remaining cells")
    perm = np.empty(N, dtype=np.int64)
    perm[pr] = pc[match]
    return perm


def sample_balanced(n: int, K: int, seed=None, retries: int = 100) -> OracleMatrix:
    """Random matrix with exactly K ones in every row and column.

    Built as the OR of K pairwise-disjoint permutation matrices; each layer
    is a perfect matching among the still-empty cells. The leftover graph is
    regular, so a matching always exists; retries only guard against
    duplicate rows.
    """
    _check_n(n)
    N = 1 << n
    if not 1 <= K <= N:
        raise OracleSetError(f"K must be in [1, {N}], got {K}")
    rng = _as_rng(seed)
    for _ in range(retries):
        rows = np.zeros((N, N), dtype=np.uint8)
        for _layer in range(K):
            perm = _random_perfect_matching(rows == 0, rng)
            rows[np.arange(N), perm] = 1
        if _duplicate_rows(rows).size == 0:
            return OracleMatrix(n, rows, meta={"family": "balanced", "K": K}, check=False)
    raise OracleSetError(f"could not build a balanced matrix with distinct rows (K={K})")


def sample_distinct(n: int, M: int, seed=None, density: float = 0.5, retries: int = 100) -> OracleMatrix:
    """M distinct uniformly random rows of length N (the generic N x M instance)."""
    _check_n(n)
    N = 1 << n
    if M < 1 or (N < 64 and M > 2**N):
        raise OracleSetError(f"cannot draw {M} distinct rows of length {N}")
    rng = _as_rng(seed)
    rows = (rng.random((M, N)) < density).astype(np.uint8)
    for _ in range(retries):
        dup = _duplicate_rows(rows)
        if dup.size == 0:
            return OracleMatrix(n, rows, meta={"family": "random", "M": M}, check=False)
        rows[dup] = (rng.random((dup.size, N)) < density).astype(np.uint8)
    raise OracleSetError("could not draw distinct rows")


# --- transforms ---------------------------------------------------------------


def column_flip(Z: OracleMatrix) -> tuple[OracleMatrix, FlipMask]:
    """Negate every column holding strictly more ones than zeros.

    The result is 1-sensitive. Ties are left alone since they already satisfy
    ones <= zeros.
    """
    ones = Z.column_weights()
    bits = (2 * ones > Z.M).astype(np.uint8)
    mask = FlipMask(bits)
    if not bits.any():
        return Z, mask
    return Z.xor_mask(bits), mask


def sensitivity(Z: OracleMatrix, subset=None) -> ColumnStats:
    counts = Z.column_weights()
    sub = None
    if subset is not None:
        sub = Z.rows[np.asarray(subset)].sum(axis=0, dtype=np.int64)
    return ColumnStats(counts=counts, K=int(counts.max()), M=Z.M, subset_counts=sub)


def half_weight_threshold(Z: OracleMatrix) -> int:
    """Largest K such that at least half of the rows carry K or more ones."""
    w = np.sort(Z.row_weights())[::-1]
    return int(w[math.ceil(Z.M / 2) - 1])


def eliminate_by_value(Z: OracleMatrix, j: int, v: int) -> OracleMatrix:
    if not 0 <= j < Z.N:
        raise OracleSetError(f"column {j} out of range")
    return Z.subset(Z.rows[:, j] == v)


def eliminate_heavy_rows(Z: OracleMatrix, K: int) -> OracleMatrix:
    return Z.subset(Z.row_weights() < K)


def best_split_column(Z: OracleMatrix) -> int | None:
    """Column whose values split Z most evenly, or None if every column is constant."""
    ones = Z.column_weights()
    balance = np.minimum(ones, Z.M - ones)
    j = int(np.argmax(balance))
    return j if balance[j] > 0 else None


def reduce_columns(Z: OracleMatrix) -> OracleMatrix:
    """Keep a small set of columns that still tells every row apart.

    Greedy: repeatedly take the largest group of rows not yet distinguished
    and add the column splitting it most evenly. The chosen columns are then
    padded with unused columns (lowest index first) up to the smallest power
    of two >= M, giving an M x M-sized problem as in the column-reduction
    argument. ``meta["greedy_columns"]`` lists the greedy picks.
    """
    M, N = Z.M, Z.N
    if 2 * M > N:
        raise OracleSetError(f"reduce_columns needs M <= N/2 (M={M}, N={N})")
    labels = np.zeros(M, dtype=np.int64)
    chosen: list[int] = []
    while True:
        uniq, counts = np.unique(labels, return_counts=True)
        if counts.max() == 1:
            break
        group = labels == uniq[np.argmax(counts)]
        sub = Z.rows[group]
        ones = sub.sum(axis=0, dtype=np.int64)
        balance = np.minimum(ones, sub.shape[0] - ones)
        balance[chosen] = -1
        j = int(np.argmax(balance))
        chosen.append(j)
        labels = labels * 2 + Z.rows[:, j]
        _, labels = np.unique(labels, return_inverse=True)
    width = 1 << math.ceil(math.log2(M))
    cols = set(chosen)
    for j in range(N):
        if len(cols) >= width:
            break
        cols.add(j)
    keep = sorted(cols)
    meta = dict(Z.meta, greedy_columns=chosen, source_columns=keep)
    return OracleMatrix(int(math.log2(len(keep))), Z.rows[:, keep], Z.row_ids, meta)


# --- file format --------------------------------------------------------------


def dumps(Z: OracleMatrix) -> str:
    lines = [f"OIP v1 n={Z.n} M={Z.M}"]
    lines.extend("".join("1" if b else "0" for b in row) for row in Z.rows)
    return "\n".join(lines) + "\n"


def save(Z: OracleMatrix, sink) -> None:
    text = dumps(Z)
    if isinstance(sink, (str, os.PathLike)):
        with open(sink, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sink.write(text)


def loads(text: str) -> OracleMatrix:
    if not text.endswith("\n"):
        raise MatrixFormatError("missing trailing newline")
    lines = text[:-1].split("\n")
    pos = 0
    while pos < len(lines) and lines[pos].startswith("#"):
        pos += 1
    if pos == len(lines):
        raise MatrixFormatError("missing header")
    m = _HEADER.match(lines[pos].strip())
    if not m:
        raise MatrixFormatError(f"malformed header: {lines[pos]!r}")
    n, M = int(m.group(1)), int(m.group(2))
    if n > MAX_QUBITS:
        raise MatrixFormatError(f"n={n} exceeds the {MAX_QUBITS}-qubit cap")
    N = 1 << n
    body = lines[pos + 1:]
    if len(body) != M:
        raise MatrixFormatError(f"header says M={M} but found {len(body)} rows")
    rows = np.empty((M, N), dtype=np.uint8)
    for i, line in enumerate(body):
        if len(line) != N:
            raise MatrixFormatError(f"row {i} has length {len(line)}, expected N={N}")
        if line.strip("01"):
            raise MatrixFormatError(f"row {i} contains characters other than 0/1")
        rows[i] = np.frombuffer(line.encode(), dtype=np.uint8) - ord("0")
    try:
        return OracleMatrix(n, rows)
    except OracleSetError as exc:
        raise MatrixFormatError(str(exc)) from None


def load(source) -> OracleMatrix:
    if isinstance(source, (str, os.PathLike)):
        with open(source, "r", newline="") as fh:
            return loads(fh.read())
    if isinstance(source, io.TextIOBase) or hasattr(source, "read"):
        return loads(source.read())
    raise TypeError("source must be a path or a readable text stream")
