"""Time the compiled and numpy kernel backends side by side.

    python3 benchmarks/bench_kernels.py [--min-n 10] [--max-n 16] [--repeat 5]

Prints one row per (kernel, n) with the best-of-repeat time for each
backend and the speedup of the compiled one.
"""

import argparse
import timeit

import numpy as np

from oraclid import kernels


def cases(n, rng):
    N = 1 << n
    v = rng.normal(size=N) + 1j * rng.normal(size=N)
    v /= np.linalg.norm(v)
    marks = (rng.random(N) < 0.01).astype(np.uint8)
    rounds = 8
    return {
        f"grover_iterate x{rounds}": lambda mod: mod.grover_iterate(v.copy(), marks, rounds),
        "walsh_hadamard": lambda mod: mod.walsh_hadamard(v.copy()),
        "phase_flip+diffuse": lambda mod: (mod.phase_flip(w := v.copy(), marks), mod.diffuse(w)),
    }


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--min-n", type=int, default=10)
    p.add_argument("--max-n", type=int, default=16)
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)

    impls = kernels.backends()
    if "cython" not in impls:
        print("compiled extension not built; timing numpy only")
    names = list(impls)
    rng = np.random.default_rng(0)
    header = f"{'kernel':<22}{'n':>4}" + "".join(f"{k + ' ms':>12}" for k in names)
    if len(names) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for n in range(args.min_n, args.max_n + 1):
        for label, fn in cases(n, rng).items():
            times = []
            for name in names:
                mod = impls[name]
                number = max(1, 2 ** max(0, 14 - n))
                t = min(timeit.repeat(lambda: fn(mod), number=number, repeat=args.repeat)) / number
                times.append(t)
            row = f"{label:<22}{n:>4}" + "".join(f"{1e3 * t:>12.3f}" for t in times)
            if len(times) == 2:
                row += f"{times[0] / times[1]:>9.1f}x"
            print(row)


if __name__ == "__main__":
    main()
