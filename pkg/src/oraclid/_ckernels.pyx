# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled state-vector kernels. Mirrors oraclid._pykernels exactly."""

from libc.math cimport sqrt


def phase_flip(double complex[::1] amps, const unsigned char[::1] marks):
    cdef Py_ssize_t i, n = amps.shape[0]
    for i in range(n):
        if marks[i]:
            amps[i] = -amps[i]


def diffuse(double complex[::1] amps):
    cdef Py_ssize_t i, n = amps.shape[0]
    cdef double complex total = 0
    for i in range(n):
        total += amps[i]
    total = 2.0 * total / n
    for i in range(n):
        amps[i] = total - amps[i]


def grover_iterate(double complex[::1] amps, const unsigned char[::1] marks, long rounds):
    cdef Py_ssize_t i, n = amps.shape[0]
    cdef long r
    cdef double complex total
    for r in range(rounds):
        total = 0
        for i in range(n):
            if marks[i]:
                amps[i] = -amps[i]
            total += amps[i]
        total = 2.0 * total / n
        for i in range(n):
            amps[i] = total - amps[i]


def walsh_hadamard(double complex[::1] amps):
    cdef Py_ssize_t n = amps.shape[0]
    cdef Py_ssize_t h = 1, i, j
    cdef double complex a, b
    cdef double scale
    while h < n:
        i = 0
        while i < n:
            for j in range(i, i + h):
                a = amps[j]
                b = amps[j + h]
                amps[j] = a + b
                amps[j + h] = a - b
            i += 2 * h
        h *= 2
    scale = 1.0 / sqrt(<double>n)
    for i in range(n):
        amps[i] = amps[i] * scale
