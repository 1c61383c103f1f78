"""Quadric rank strata inside ``I_2`` (the d = 2 case).

A quadric ``Q(x) = x^T G x`` is handled through its symmetric Gram matrix G;
the off-diagonal entries are half the mixed coefficients, which is why odd
characteristic is required.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field as dc_field

import numpy as np
from sympy import ZZ
from sympy.polys.galoistools import gf_factor

from lefschetz_lab import _kernels
from lefschetz_lab.algebra import Algebra, as_poly
from lefschetz_lab.errors import DegreeError, MalformedInputError, UnsupportedError
from lefschetz_lab.inverse import _reduce_coefficient, count_projective_points, projective_points
from lefschetz_lab.linalg import FieldSpec, Matrix, Subspace, _matmul, determinant, rank, rref
from lefschetz_lab.poly import OPERATOR, Poly, monomial_basis
from lefschetz_lab.seeding import stream


@dataclass(frozen=True)
class GramForm:
    Q: Poly
    G: Matrix

    @property
    def rank(self) -> int:
        return rank(self.G)


def gram(Q: Poly) -> GramForm:
    if Q.degree != 2 or Q.side != OPERATOR:
        raise DegreeError("gram() expects an operator quadric")
    field, n = Q.field, Q.nvars
    half = field.inv(2)
    G = field.zeros((n, n))
    for exps, c in Q.terms.items():
        idx = [i for i, e in enumerate(exps) for _ in range(e)]
        i, j = idx
        if i == j:
            G[i, i] = c
        else:
            G[i, j] = G[j, i] = field(c * half)
    return GramForm(Q, Matrix(field, G))


def quadric_from_gram(G: Matrix) -> Poly:
    """``x^T G x`` as a polynomial."""
    field, n = G.field, G.rows
    terms = {}
    for i in range(n):
        for j in range(n):
            e = [0] * n
            e[i] += 1
            e[j] += 1
            e = tuple(e)
            terms[e] = terms.get(e, 0) + G.data[i, j]
    return Poly(field, n, 2, terms)


def _require_quadrics(A: Algebra):
    if A.d != 2:
        raise UnsupportedError("quadric strata are defined for d = 2")


def ideal_quadrics(A: Algebra) -> list[Poly]:
    _require_quadrics(A)
    return [Poly.from_vector(A.field, A.nvars, 2, row) for row in A.piece(2).ideal.basis.data]


def random_ideal_quadric(A: Algebra, rng: np.random.Generator) -> tuple[Poly, int]:
    """A random nonzero element of ``I_2`` and the number of rejected draws."""
    basis = ideal_quadrics(A)
    rejected = 0
    while True:
        coeffs = A.field.random_elements(rng, len(basis))
        if any(coeffs):
            break
        rejected += 1
    out = Poly.zero(A.field, A.nvars, 2)
    for c, q in zip(coeffs, basis):
        out = out + q.scale(c)
    return out, rejected


@dataclass(frozen=True)
class StratumHistogram:
    histogram: dict[int, int]
    samples: int
    full_rank_fraction: float
    threshold: float
    anomaly: bool
    rejected: int

    def to_dict(self) -> dict:
        return {
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
            "samples": self.samples,
            "full_rank_fraction": self.full_rank_fraction,
            "threshold": self.threshold,
            "anomaly": self.anomaly,
            "rejected": self.rejected,
        }


def stratum_sample(A: Algebra, samples: int = 200, seed: int = 0) -> StratumHistogram:
    """Gram-rank histogram of random elements of ``I_2``.

    The anomaly threshold is ``1 - samples*(m+1)/S`` where S is the size of
    the coefficient sample set (p, or 19 for the rationals' [-9, 9]).
    """
    _require_quadrics(A)
    n = A.nvars
    hist: Counter = Counter()
    rejected = 0
    for i in range(samples):
        Q, r = random_ideal_quadric(A, stream(seed, "stratum_sample", i))
        rejected += r
        hist[gram(Q).rank] += 1
    size = A.field.p if A.field.is_prime else 19
    threshold = max(0.0, 1 - samples * n / size)
    frac = hist[n] / samples if samples else 1.0
    return StratumHistogram({k: hist.get(k, 0) for k in range(1, n + 1)}, samples, frac,
                            threshold, frac < threshold, rejected)


# --------------------------------------------------------------------------
# pencils


@dataclass(frozen=True)
class PencilProfile:
    """Rank drops along the pencil ``lam*Q1 + mu*Q2`` over F_p.

    Points are ``(lam, mu)`` with ``(1, t)`` for t in F_p and ``(0, 1)``.
    ``generic_rank`` is the rank of a general member; ``degenerate`` lists the
    members of smaller rank.  When the generic rank is below m+1 the
    determinant vanishes identically and the pencil itself is degenerate.
    """

    method: str
    points: int
    generic_rank: int
    degenerate: tuple[tuple[tuple[int, int], int], ...]
    identically_singular: bool
    rank_counts: dict[int, int] = dc_field(default_factory=dict)

    @property
    def degenerate_count(self) -> int:
        return len(self.degenerate)

    @property
    def min_rank(self) -> int:
        return min((r for _, r in self.degenerate), default=self.generic_rank)

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "points": self.points,
            "generic_rank": self.generic_rank,
            "identically_singular": self.identically_singular,
            "degenerate": [{"point": list(pt), "rank": r} for pt, r in self.degenerate],
            "rank_counts": {str(k): v for k, v in sorted(self.rank_counts.items())},
        }


def _interpolate_mod(xs: list[int], ys: list[int], p: int) -> list[int]:
    """Coefficients (low to high) of the polynomial through the points, mod p."""
    field = FieldSpec.prime(p)
    n = len(xs)
    aug = np.array([[pow(x, k, p) for k in range(n)] + [y] for x, y in zip(xs, ys)], dtype=np.int64)
    red, pivots = rref(Matrix(field, aug))
    if pivots != list(range(n)):
        raise MalformedInputError("interpolation nodes must be distinct")
    return [int(v) for v in red.data[:n, n]]


def roots_mod_p(coeffs_low_to_high: list[int], p: int) -> list[int]:
    """Distinct roots in F_p of a nonzero polynomial."""
    f = [c % p for c in reversed(coeffs_low_to_high)]
    while f and f[0] == 0:
        f.pop(0)
    if not f:
        raise MalformedInputError("the zero polynomial has every point as a root")
    if len(f) == 1:
        return []
    _, factors = gf_factor([ZZ(c) for c in f], p, ZZ)
    return sorted(int(-g[1]) % p for g, _ in factors if len(g) == 2)


def _minor_polynomial(G1: np.ndarray, G2: np.ndarray, r: int, p: int, rng) -> list[int]:
    """``det(P (G1 + t G2) R)`` for random r x n / n x r projections P, R.

    Nonzero for most projections whenever the generic rank is r; its roots
    contain every t where the rank drops below r.
    """
    n = G1.shape[0]
    field = FieldSpec.prime(p)
    while True:
        if r == n:
            P = R = np.eye(n, dtype=np.int64)
        else:
            P = rng.integers(0, p, (r, n), dtype=np.int64)
            R = rng.integers(0, p, (n, r), dtype=np.int64)
        xs = list(range(r + 1))
        ys = []
        for x in xs:
            G = (G1 + x * G2) % p
            ys.append(int(determinant(Matrix(field, _matmul(field, _matmul(field, P, G), R)))))
        coeffs = _interpolate_mod(xs, ys, p)
        if any(coeffs) or r == n:
            return coeffs


def pencil_profile(A: Algebra, Q1, Q2, method: str = "auto", seed: int = 0) -> PencilProfile:
    """Ranks along the pencil spanned by two independent quadrics of ``I_2``.

    ``scan`` evaluates all p+1 members.  ``roots`` factors a determinant of
    degree at most m+1 restricted to the pencil (a random maximal minor when
    the pencil is identically singular) and only inspects its roots.
    ``auto`` scans when p <= 4099.
    """
    _require_quadrics(A)
    if not A.field.is_prime:
        raise UnsupportedError("pencil scans need a prime field")
    Q1, Q2 = as_poly(A, Q1), as_poly(A, Q2)
    ideal = A.piece(2).ideal
    for Q in (Q1, Q2):
        if Q.degree != 2 or not ideal.contains(Q.to_vector()):
            raise MalformedInputError("pencil members must be quadrics of I_2")
    if Subspace.span(A.field, ideal.ambient_dim, [Q1.to_vector(), Q2.to_vector()]).dim != 2:
        raise MalformedInputError("pencil needs two independent quadrics")
    p, n = A.field.p, A.nvars
    if method == "auto":
        method = "scan" if p <= 4099 else "roots"
    G1, G2 = gram(Q1).G.data, gram(Q2).G.data
    if method == "scan":
        ranks = _kernels.line_ranks(G1, G2, p)
        r = int(ranks.max())
        bad = np.flatnonzero(ranks < r)
        degenerate = tuple(((1, int(t)) if t < p else (0, 1), int(ranks[t])) for t in bad)
        counts = Counter(int(x) for x in ranks)
        return PencilProfile("scan", p + 1, r, degenerate, r < n, dict(counts))
    if method != "roots":
        raise MalformedInputError(f"unknown pencil method {method!r}")
    # fewer than n+2 members drop rank, so one of these reaches the generic rank
    r = max(_kernels.rank((G1 + t * G2) % p, p) for t in range(n + 2))
    coeffs = _minor_polynomial(G1, G2, r, p, stream(seed, "pencil_minor"))
    degenerate = []
    for t in roots_mod_p(coeffs, p):
        rt = _kernels.rank((G1 + t * G2) % p, p)
        if rt < r:
            degenerate.append(((1, t), rt))
    r_inf = _kernels.rank(G2, p)
    if r_inf < r:
        degenerate.append(((0, 1), r_inf))
    counts = Counter(x for _, x in degenerate)
    counts[r] = p + 1 - len(degenerate)
    return PencilProfile("roots", p + 1, r, tuple(degenerate), r < n, dict(counts))


def random_pencil(A: Algebra, rng: np.random.Generator) -> tuple[Poly, Poly]:
    while True:
        Q1, _ = random_ideal_quadric(A, rng)
        Q2, _ = random_ideal_quadric(A, rng)
        span = Subspace.span(A.field, A.piece(2).ideal.ambient_dim, [Q1.to_vector(), Q2.to_vector()])
        if span.dim == 2:
            return Q1, Q2


# --------------------------------------------------------------------------
# incidence and Veronese probes


def linear_multiples(A: Algebra, forms) -> Subspace:
    """``<forms> * U*`` inside the degree-2 polynomials."""
    n = A.nvars
    vecs = []
    for f in forms:
        f = as_poly(A, f)
        if f.degree != 1:
            raise DegreeError("linear_multiples expects linear forms")
        for i in range(n):
            vecs.append((f * Poly.variable(A.field, n, i)).to_vector())
    return Subspace.span(A.field, len(monomial_basis(n, 2)), np.array(vecs, dtype=A.field.dtype))


def upsilon_probe(A: Algebra, z, w) -> int:
    """``dim(<z, w> U* cap I_2)``; at most 2 for a complete intersection."""
    _require_quadrics(A)
    z, w = as_poly(A, z), as_poly(A, w)
    if Subspace.span(A.field, A.nvars, [z.to_vector(), w.to_vector()]).dim != 2:
        raise MalformedInputError("upsilon_probe needs independent linear forms")
    return linear_multiples(A, [z, w]).intersection(A.piece(2).ideal).dim


@dataclass(frozen=True)
class VeroneseScan:
    scan_prime: int
    exhaustive: bool
    points: int
    hits: tuple[tuple[int, ...], ...]
    hit_quadrics: tuple[str, ...]
    degenerate_reduction: bool

    def to_dict(self) -> dict:
        return {
            "scan_prime": self.scan_prime,
            "exhaustive": self.exhaustive,
            "points": self.points,
            "hits": [list(h) for h in self.hits],
            "hit_quadrics": list(self.hit_quadrics),
            "degenerate_reduction": self.degenerate_reduction,
        }


def veronese_scan(A: Algebra, scan_prime: int | None = None, budget: int = 100_000,
                  samples: int = 2000, seed: int = 0) -> VeroneseScan:
    """Rank-1 members of ``P(I_2)`` over ``F_q``.

    The generators are reduced mod q (through integer representatives for a
    prime-field instance).  Exhaustive when ``P^m(F_q)`` has at most
    ``budget`` points, otherwise ``samples`` random points are tested.
    """
    _require_quadrics(A)
    if scan_prime is None:
        if not A.field.is_prime:
            raise MalformedInputError("a scan prime is required for the rational field")
        scan_prime = A.field.p
    q = scan_prime
    fq = FieldSpec.prime(q)
    n = A.nvars
    gens = [Poly(fq, n, 2, {e: _reduce_coefficient(A.field, c, q) for e, c in f.terms.items()})
            for f in A.instance.generators]
    grams = np.array([gram(f).G.data for f in gens], dtype=np.int64)
    dependent = rank(Matrix(fq, np.array([f.to_vector() for f in gens], dtype=np.int64))) < len(gens)
    total = count_projective_points(len(gens), q)
    exhaustive = total <= budget
    if exhaustive:
        pts = projective_points(len(gens), q)
    else:
        rng = stream(seed, "veronese_scan")
        pts = (tuple(int(x) for x in rng.integers(0, q, len(gens))) for _ in range(samples))
    hits, texts, scanned = [], [], 0
    for c in pts:
        if not any(c):
            continue
        scanned += 1
        G = np.tensordot(np.array(c, dtype=np.int64), grams, axes=1) % q
        if _kernels.rank(G, q) == 1:
            hits.append(c)
            texts.append(quadric_from_gram(Matrix(fq, G)).to_text())
    return VeroneseScan(q, exhaustive, scanned, tuple(hits), tuple(texts), dependent)
