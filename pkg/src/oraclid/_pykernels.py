"""Pure numpy implementations of the state-vector kernels.

Each function mutates ``amps`` (a contiguous complex128 array) in place.
"""

import numpy as np


def phase_flip(amps, marks):
    np.negative(amps, out=amps, where=marks.astype(bool))


def diffuse(amps):
    mean2 = 2.0 * amps.mean()
    np.subtract(mean2, amps, out=amps)


def grover_iterate(amps, marks, rounds):
    sign = 1.0 - 2.0 * marks.astype(np.float64)
    for _ in range(rounds):
        amps *= sign
        np.subtract(2.0 * amps.mean(), amps, out=amps)


def walsh_hadamard(amps):
    n = amps.shape[0]
    h = 1
    while h < n:
        view = amps.reshape(-1, 2, h)
        a = view[:, 0, :].copy()
        view[:, 0, :] += view[:, 1, :]
        view[:, 1, :] = a - view[:, 1, :]
        h *= 2
    amps /= np.sqrt(n)
