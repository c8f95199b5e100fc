"""State-vector simulation of the phase-oracle query model.

The oracle's output qubit is fixed to |1>, which turns an oracle call into
the diagonal phase ``(-1)^f(x)`` on the n-qubit query register. Every oracle
call, quantum or classical, increments one shared counter.
"""

from __future__ import annotations

import math

import numpy as np

from . import kernels
from .oracle_set import MAX_QUBITS, FlipMask

MEASURE_TOLERANCE = 1e-6


class SimulationError(ValueError):
    pass


class StateVector:
    """Amplitudes of an n-qubit register, basis index = column index."""

    __slots__ = ("n", "amps")

    def __init__(self, n: int, amps):
        amps = np.ascontiguousarray(amps, dtype=np.complex128)
        if amps.shape != (1 << n,):
            raise SimulationError(f"expected {1 << n} amplitudes, got shape {amps.shape}")
        self.n = n
        self.amps = amps

    @property
    def N(self) -> int:
        return self.amps.shape[0]

    def norm(self) -> float:
        return float(np.sqrt(np.vdot(self.amps, self.amps).real))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def copy(self) -> "StateVector":
        return StateVector(self.n, self.amps.copy())


class HiddenOracle:
    """The black box: a secret row, the flip mask in force, and a query counter.

    Answers are ``row[x] ^ mask[x]``. The mask models the extra gate on the
    oracle output that column flipping requires, so it can be changed freely
    without cost.
    """

    def __init__(self, row, mask=None):
        row = np.ascontiguousarray(row, dtype=np.uint8)
        N = row.shape[0]
        if N < 1 or N & (N - 1):
            raise SimulationError("oracle row length must be a power of two")
        self.row = row
        self.n = N.bit_length() - 1
        self._mask = np.zeros(N, dtype=np.uint8)
        self._values = row.copy()
        self.counter = 0
        if mask is not None:
            self.set_mask(mask)

    @property
    def N(self) -> int:
        return self.row.shape[0]

    @property
    def mask(self) -> np.ndarray:
        return self._mask

    def set_mask(self, mask) -> None:
        bits = np.asarray(mask.bits if isinstance(mask, FlipMask) else mask, dtype=np.uint8)
        if bits.shape != self.row.shape:
            raise SimulationError("mask length must equal N")
        self._mask = bits.copy()
        self._values = self.row ^ self._mask

    def clear_mask(self) -> None:
        self.set_mask(np.zeros(self.N, dtype=np.uint8))

    def values(self) -> np.ndarray:
        """The effective truth table f'. Used by the simulator only, never by algorithms."""
        return self._values

    def tick(self, calls: int = 1) -> None:
        self.counter += calls

    def query(self, j: int) -> int:
        if not 0 <= j < self.N:
            raise SimulationError(f"query index {j} out of range [0, {self.N})")
        self.counter += 1
        return int(self._values[j])

    def restrict(self, columns) -> "RestrictedOracle":
        return RestrictedOracle(self, columns)


class RestrictedOracle:
    """The oracle seen through a subset of its inputs (e.g. some bits pinned to 0).

    Local index ``i`` maps to parent column ``columns[i]``; calls are charged
    to the parent's counter.
    """

    def __init__(self, parent, columns):
        cols = np.asarray(columns, dtype=np.int64)
        L = cols.shape[0]
        if L < 1 or L & (L - 1):
            raise SimulationError("restricted domain size must be a power of two")
        if cols.min() < 0 or cols.max() >= parent.N:
            raise SimulationError("restricted columns out of range")
        self.parent = parent
        self.columns = cols
        self.n = L.bit_length() - 1

    @property
    def N(self) -> int:
        return self.columns.shape[0]

    @property
    def counter(self) -> int:
        return self.parent.counter

    def values(self) -> np.ndarray:
        return np.ascontiguousarray(self.parent.values()[self.columns])

    def tick(self, calls: int = 1) -> None:
        self.parent.tick(calls)

    def query(self, j: int) -> int:
        if not 0 <= j < self.N:
            raise SimulationError(f"query index {j} out of range [0, {self.N})")
        return self.parent.query(int(self.columns[j]))

    def restrict(self, columns) -> "RestrictedOracle":
        return RestrictedOracle(self, columns)


def init_uniform(n: int) -> StateVector:
    if not isinstance(n, (int, np.integer)) or not 0 <= n <= MAX_QUBITS:
        raise SimulationError(f"qubit count must be in [0, {MAX_QUBITS}], got {n!r}")
    N = 1 << n
    return StateVector(n, np.full(N, 1.0 / math.sqrt(N), dtype=np.complex128))


def basis_state(n: int, j: int) -> StateVector:
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[j] = 1.0
    return StateVector(n, amps)


def _check_dims(state, oracle):
    if state.N != oracle.N:
        raise SimulationError(f"state has {state.N} amplitudes but oracle has N={oracle.N}")


def apply_phase_oracle(state: StateVector, oracle) -> None:
    _check_dims(state, oracle)
    kernels.phase_flip(state.amps, oracle.values())
    oracle.tick()


def apply_hadamard_all(state: StateVector) -> None:
    kernels.walsh_hadamard(state.amps)


def apply_diffusion(state: StateVector) -> None:
    """Inversion about the mean: ``a_x -> 2*mean(a) - a_x``."""
    kernels.diffuse(state.amps)


def apply_grover_iterations(state: StateVector, oracle, rounds: int) -> None:
    """``rounds`` Grover iterates (phase oracle then diffusion), one query each."""
    _check_dims(state, oracle)
    if rounds < 0:
        raise SimulationError("iteration count must be non-negative")
    if rounds:
        kernels.grover_iterate(state.amps, oracle.values(), int(rounds))
        oracle.tick(rounds)


def measure(state: StateVector, rng: np.random.Generator) -> int:
    """Sample a basis index and collapse the state onto it."""
    probs = state.probabilities()
    total = probs.sum()
    if abs(total - 1.0) > MEASURE_TOLERANCE:
        raise SimulationError(f"state norm^2 is {total:.12g}; refusing to measure")
    cdf = np.cumsum(probs)
    x = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
    x = min(x, state.N - 1)
    state.amps[:] = 0
    state.amps[x] = 1.0
    return x


def classical_query(oracle, j: int) -> int:
    return oracle.query(j)
