"""Independent reference implementations used as test oracles.

Nothing here imports the package's linear algebra or polynomial code.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import product


def bareiss_rank(rows) -> int:
    """Rank of an integer matrix by fraction-free (Bareiss) elimination."""
    a = [[int(x) for x in row] for row in rows]
    if not a or not a[0]:
        return 0
    nrows, ncols = len(a), len(a[0])
    prev, r = 1, 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        for i in range(r + 1, nrows):
            for j in range(c + 1, ncols):
                a[i][j] = (a[r][c] * a[i][j] - a[i][c] * a[r][j]) // prev
            a[i][c] = 0
        prev = a[r][c]
        r += 1
        if r == nrows:
            break
    return r


def rank_mod_p(rows, p: int) -> int:
    """Rank over F_p by plain Gaussian elimination on Python ints."""
    a = [[int(x) % p for x in row] for row in rows]
    if not a or not a[0]:
        return 0
    r = 0
    for c in range(len(a[0])):
        piv = next((i for i in range(r, len(a)) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = pow(a[r][c], -1, p)
        a[r] = [x * inv % p for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[r])]
        r += 1
    return r


def rank_fraction(rows) -> int:
    """Rank of a matrix of Fractions: clear denominators, then Bareiss."""
    from math import lcm

    scaled = []
    for row in rows:
        den = lcm(*(Fraction(x).denominator for x in row)) if row else 1
        scaled.append([int(Fraction(x) * den) for x in row])
    return bareiss_rank(scaled)


def koszul_series(m: int, d: int, kmax: int) -> list[int]:
    """Coefficients of ``(1 + t + ... + t^(d-1))^(m+1)`` up to ``t^kmax``."""
    series = [1]
    for _ in range(m + 1):
        nxt = [0] * (len(series) + d - 1)
        for i, c in enumerate(series):
            for j in range(d):
                nxt[i + j] += c
        series = nxt
    return (series + [0] * (kmax + 1))[: kmax + 1]


def horner(terms: dict, point, modulus=None):
    """Evaluate ``{exps: coef}`` by nested Horner in the first variable."""
    if not terms:
        return 0
    n = len(next(iter(terms)))
    if n == 0:
        return sum(terms.values())
    by_power: dict[int, dict] = {}
    for e, c in terms.items():
        by_power.setdefault(e[0], {})[e[1:]] = c
    acc = 0
    for k in range(max(by_power), -1, -1):
        acc = acc * point[0] + horner(by_power.get(k, {}), point[1:], modulus)
        if modulus:
            acc %= modulus
    return acc


def squarefree(n: int, k: int):
    """Squarefree exponent vectors of degree k in n variables."""
    return [e for e in product((0, 1), repeat=n) if sum(e) == k]
