"""Compare the compiled and pure-Python elimination kernels.

Run ``python benchmarks/bench_kernels.py``.  Inputs are seeded, and each
case first checks that both backends return the same answer.
"""
import argparse
import timeit

import numpy as np

from lefschetz_lab._kernels import compiled, pure

P = 65521


def cases(rng):
    square = rng.integers(0, P, (40, 40))
    tall = rng.integers(0, P, (120, 60))
    low = rng.integers(0, P, (60, 8)) @ rng.integers(0, P, (8, 60)) % P
    a, b = rng.integers(0, P, (10, 10)), rng.integers(0, P, (10, 10))
    return [
        ("rank 40x40", "rank", (square, P)),
        ("rank 120x60", "rank", (tall, P)),
        ("rank 60x60 of rank 8", "rank", (low, P)),
        ("rref 40x40", "rref", (square, P)),
        ("line_ranks 10x10 over F_65521", "line_ranks", (a, b, P)),
    ]


def same(x, y):
    if isinstance(x, tuple):
        return all(same(u, v) for u, v in zip(x, y))
    return np.array_equal(np.asarray(x), np.asarray(y))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if compiled is None:
        raise SystemExit("compiled kernels are not built; run pip install -e . first")
    rng = np.random.default_rng(args.seed)
    print(f"{'case':<32}{'compiled':>12}{'pure':>12}{'speedup':>10}")
    for name, fn, inputs in cases(rng):
        fc, fp = getattr(compiled, fn), getattr(pure, fn)
        if not same(fc(*inputs), fp(*inputs)):
            raise SystemExit(f"{name}: backends disagree")
        number = 1 if fn == "line_ranks" else 20
        tc = min(timeit.repeat(lambda: fc(*inputs), number=number, repeat=args.repeat)) / number
        tp = min(timeit.repeat(lambda: fp(*inputs), number=number, repeat=args.repeat)) / number
        print(f"{name:<32}{tc * 1e3:>10.2f}ms{tp * 1e3:>10.2f}ms{tp / tc:>9.1f}x")


if __name__ == "__main__":
    main()
