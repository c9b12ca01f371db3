"""Time the compiled kernels against the pure-Python fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeat 5] [--seed 0]
"""
import argparse
import random
import timeit
from fractions import Fraction

from unitary_newforms import _pykernels

try:
    from unitary_newforms import _kernels
except ImportError:  # extension not built
    _kernels = None


def smith_inputs(rng: random.Random, count: int, N: int, p: int, M: int):
    mod = p ** M
    return [([rng.randrange(mod) * p ** rng.randrange(3) for _ in range(N * N)],
             [rng.randrange(mod) for _ in range(N * N)]) for _ in range(count)]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    p, eps, M = 3, 2, 10
    cases = {N: smith_inputs(rng, 200, N, p, M) for N in (3, 5)}
    angles = [Fraction(rng.randrange(1000), 997) for _ in range(5000)]
    mods = [("python", _pykernels)] + ([("cython", _kernels)] if _kernels else [])
    print(f"{'kernel':22} {'backend':8} {'best_s':>10}")
    for N, inputs in cases.items():
        for name, mod in mods:
            t = min(timeit.repeat(lambda: [mod.smith_valuations(a, b, N, p, eps, M)
                                           for a, b in inputs], number=1, repeat=args.repeat))
            print(f"{f'smith_valuations N={N}':22} {name:8} {t:>10.4f}")
    for name, mod in mods:
        t = min(timeit.repeat(lambda: mod.angle_sum(angles), number=1, repeat=args.repeat))
        print(f"{'angle_sum 5000':22} {name:8} {t:>10.4f}")
    if _kernels is None:
        print("compiled extension not importable; only the fallback was timed")


if __name__ == "__main__":
    main()
