"""Lefschetz verdicts and kernel-pair analysis.

Genericity is handled by sampling: a property of a *general* linear form
passes as soon as one sampled form achieves it.  Sampling can never show
that every form fails, so a failure verdict is only issued over the
rationals, where the rank for a symbolic form ``L = sum t_i x_i`` is
computed exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np
import sympy
from sympy.polys.matrices import DomainMatrix

from lefschetz_lab import _kernels
from lefschetz_lab.algebra import Algebra, ElementClass, _require_regular, as_poly, mult_map
from lefschetz_lab.errors import DegreeError, MalformedInputError, UnsupportedError
from lefschetz_lab.linalg import Matrix, Subspace, hstack, kernel_basis, rank
from lefschetz_lab.poly import Poly, evaluate, monomial_basis, monomial_weight, power
from lefschetz_lab.quadrics import upsilon_probe
from lefschetz_lab.seeding import stream

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"


def random_linear(A: Algebra, rng: np.random.Generator) -> Poly:
    while True:
        coeffs = A.field.random_elements(rng, A.nvars)
        if any(coeffs):
            return Poly.linear(A.field, coeffs)


@dataclass(frozen=True)
class DegreeRecord:
    k: int
    source_dim: int
    target_dim: int
    target_rank: int
    best_rank: int
    first_rank: int
    trials_used: int
    verdict: str
    j: int = 1

    def to_dict(self) -> dict:
        return {
            "k": self.k, "j": self.j, "source_dim": self.source_dim, "target_dim": self.target_dim,
            "target_rank": self.target_rank, "best_rank": self.best_rank,
            "first_rank": self.first_rank, "trials_used": self.trials_used, "verdict": self.verdict,
        }


@dataclass(frozen=True)
class LefschetzReport:
    kind: str
    records: tuple[DegreeRecord, ...]
    verdict: str
    seed: int
    notes: tuple[str, ...] = ()

    def record(self, k: int, j: int = 1) -> DegreeRecord:
        for r in self.records:
            if r.k == k and r.j == j:
                return r
        raise KeyError((k, j))

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "verdict": self.verdict,
            "seed": self.seed,
            "records": [r.to_dict() for r in self.records],
            "notes": list(self.notes),
        }


def generic_rank(A: Algebra, k: int, j: int = 1) -> int:
    """Rank of ``mu_{L^j}: A_k -> A_{k+j}`` for the symbolic form ``L = sum t_i x_i``.

    Exact over the rationals: the matrix has entries in ``ZZ[t]`` after
    clearing denominators, and fraction-free elimination gives its rank over
    the fraction field, i.e. the rank at a general point.  Slow beyond a
    10 x 10 map in five variables (tens of seconds).
    """
    if A.field.is_prime:
        raise UnsupportedError("symbolic ranks are computed over the rationals only")
    n = A.nvars
    rows, cols = A.hf(k + j), A.hf(k)
    if rows == 0 or cols == 0:
        return 0
    R, *ts = sympy.ring(f"t0:{n}", sympy.ZZ)
    parts = []
    for alpha in monomial_basis(n, j):
        mat = mult_map(A, Poly.monomial(A.field, alpha), k).data
        mono = R(math.factorial(j) // monomial_weight(alpha))
        for i, e in enumerate(alpha):
            mono *= ts[i] ** e
        parts.append((mono, mat))
    den = math.lcm(*(x.denominator for _, mat in parts for x in mat.flat))
    entries = [[R(0)] * cols for _ in range(rows)]
    for mono, mat in parts:
        for r in range(rows):
            for c in range(cols):
                if mat[r, c]:
                    entries[r][c] += mono * int(mat[r, c] * den)
    _, _, pivots = DomainMatrix(entries, (rows, cols), R.to_domain()).rref_den()
    return len(pivots)


def _maximal_rank_scan(A, kind, pairs, trials, seed, form):
    """Shared driver: ``pairs`` lists (k, j); ``form(t, j)`` gives the operator of trial t."""
    if trials < 1:
        raise MalformedInputError("trials must be positive")
    records, notes = [], []
    for k, j in pairs:
        src, tgt = A.hf(k), A.hf(k + j)
        target = min(src, tgt)
        first = best = None
        used = 0
        for t in range(trials):
            r = rank(mult_map(A, form(t, j), k))
            used += 1
            first = r if first is None else first
            best = r if best is None else max(best, r)
            if best == target:
                break
        if best == target:
            verdict = PASS
        elif not A.field.is_prime:
            g = generic_rank(A, k, j)
            verdict = FAIL if g < target else INCONCLUSIVE
            notes.append(f"k={k} j={j}: symbolic rank {g} of {target}")
        else:
            verdict = INCONCLUSIVE
        records.append(DegreeRecord(k, src, tgt, target, best, first, used, verdict, j))
    verdicts = {r.verdict for r in records}
    overall = FAIL if FAIL in verdicts else INCONCLUSIVE if INCONCLUSIVE in verdicts else PASS
    return LefschetzReport(kind, tuple(records), overall, seed, tuple(notes))


def wlp_check(A: Algebra, trials: int = 8, seed: int = 0) -> LefschetzReport:
    """Maximal rank of ``mu_L: A_k -> A_{k+1}`` for k < M, over sampled L."""
    _require_regular(A, "wlp_check")
    forms = [random_linear(A, stream(seed, "wlp", t)) for t in range(trials)]
    return _maximal_rank_scan(A, "wlp", [(k, 1) for k in range(A.M)], trials, seed,
                              lambda t, j: forms[t])


def slp_check(A: Algebra, trials: int = 8, seed: int = 0) -> LefschetzReport:
    """Maximal rank of ``mu_{L^j}: A_k -> A_{k+j}`` for all k + j <= M."""
    _require_regular(A, "slp_check")
    forms = [random_linear(A, stream(seed, "slp", t)) for t in range(trials)]
    powers: dict = {}

    def form(t, j):
        if (t, j) not in powers:
            powers[t, j] = power(forms[t], j)
        return powers[t, j]

    pairs = [(k, j) for j in range(1, A.M + 1) for k in range(A.M - j + 1)]
    return _maximal_rank_scan(A, "slp", pairs, trials, seed, form)


def injectivity_lemma_check(A: Algebra, trials: int = 8, seed: int = 0) -> DegreeRecord:
    """Injectivity of ``mu_z: A_{d-1} -> A_d`` for a general linear z."""
    _require_regular(A, "injectivity_lemma_check")
    forms = [random_linear(A, stream(seed, "injectivity", t)) for t in range(trials)]
    k = A.d - 1
    report = _maximal_rank_scan(A, "injectivity", [(k, 1)], trials, seed, lambda t, j: forms[t])
    rec = report.records[0]
    if rec.target_rank != rec.source_dim:
        raise DegreeError("A_{d-1} is larger than A_d, so no z is injective; this needs m >= 2")
    return rec


# --------------------------------------------------------------------------
# kernel pairs


def _linear(A: Algebra, z) -> Poly:
    z = as_poly(A, z)
    if z.degree != 1:
        raise DegreeError("expected a linear form")
    if A.element(z).is_zero():
        raise MalformedInputError("the zero linear form is excluded")
    return z


def _of_degree(A: Algebra, Q, k: int) -> Poly:
    Q = as_poly(A, Q)
    if Q.degree != k:
        raise DegreeError(f"expected degree {k}, got {Q.degree}")
    return Q


def Q_of_z(A: Algebra, z) -> Subspace:
    """``{Q in A_s : zQ = 0}`` in coordinates of ``A_s``."""
    _require_regular(A, "Q_of_z")
    return kernel_basis(mult_map(A, _linear(A, z), A.s))


def Z_of_Q(A: Algebra, Q) -> Subspace:
    """``{z in A_1 : zQ = 0}`` in coordinates of ``A_1`` (the variables, in order)."""
    _require_regular(A, "Z_of_Q")
    Q = _of_degree(A, Q, A.s)
    return kernel_basis(mult_map(A, Q, 1))


@dataclass(frozen=True)
class KernelPair:
    z: ElementClass
    Q: ElementClass
    dimQz: int
    dimZQ: int

    @property
    def epsilon(self) -> int:
        return self.dimQz - 1

    @property
    def delta(self) -> int:
        return self.dimZQ - 1

    def to_dict(self, field) -> dict:
        return {
            "z": [field.format(c) for c in self.z.coords],
            "Q": [field.format(c) for c in self.Q.coords],
            "dimQz": self.dimQz,
            "dimZQ": self.dimZQ,
        }


def kernel_pairs(A: Algebra, z, limit: int | None = None) -> list[KernelPair]:
    """Pairs (z, Q) for Q running over the canonical basis of ``Q_of_z(z)``."""
    z = _linear(A, z)
    kernel = Q_of_z(A, z)
    ez = A.element(z)
    pairs = []
    for row in kernel.basis.data[:limit]:
        Q = A.element_from_coords(A.s, row)
        pairs.append(KernelPair(ez, Q, kernel.dim, Z_of_Q(A, Q).dim))
    return pairs


@dataclass(frozen=True)
class LineHits:
    """Scan of one line (or of lines inside one plane) in ``P(A_1)``."""

    index: int
    points: int
    hits: tuple[tuple[int, ...], ...]
    identically_singular: bool

    def to_dict(self) -> dict:
        return {"index": self.index, "points": self.points, "hit_count": len(self.hits),
                "hits": [list(h) for h in self.hits],
                "identically_singular": self.identically_singular}


@dataclass(frozen=True)
class LocusScan:
    mode: str
    degree: int
    square: bool
    bound: int | None
    lines: tuple[LineHits, ...]
    pairs: tuple[KernelPair, ...]
    truncated: bool
    notes: tuple[str, ...] = dc_field(default=())

    @property
    def total_hits(self) -> int:
        return sum(len(x.hits) for x in self.lines)

    def bound_respected(self) -> bool:
        if self.bound is None:
            return True
        return all(x.identically_singular or len(x.hits) <= self.bound for x in self.lines)


def locus_scan(A: Algebra, mode: str = "line", samples: int = 4, seed: int = 0,
               degree: int | None = None, max_pairs: int = 64, lines_per_plane: int = 8,
               plane_budget: int = 200_000) -> LocusScan:
    """Search for z with ``mu_z: A_k -> A_{k+1}`` not injective.

    ``degree`` defaults to the critical degree s (pair harvesting); use
    ``d - 1`` for the injectivity locus.  Line mode scans all p+1 points of
    ``samples`` random lines in ``P(A_1)``.  Plane mode scans ``samples``
    random planes, exhaustively when ``p^2 + p + 1 <= plane_budget`` and
    otherwise along ``lines_per_plane`` random lines in each plane.  Hits
    are reported as coefficient vectors of z, in scan order.
    """
    _require_regular(A, "locus_scan")
    if not A.field.is_prime:
        raise UnsupportedError("locus scans enumerate F_p points and need a prime field")
    if mode not in ("line", "plane"):
        raise MalformedInputError(f"unknown scan mode {mode!r}")
    if mode == "plane" and A.nvars < 3:
        raise UnsupportedError("plane scans need at least three variables")
    k = A.s if degree is None else degree
    if not 0 <= k < A.M:
        raise DegreeError(f"degree must lie in 0..{A.M - 1}")
    p, n, src = A.field.p, A.nvars, A.hf(k)
    square = src == A.hf(k + 1)
    bound = src if square else None
    maps = {}

    def phi(z: Poly) -> Matrix:
        key = tuple(z.to_vector())
        if key not in maps:
            maps[key] = mult_map(A, z, k)
        return maps[key]

    def scan(a: np.ndarray, b: np.ndarray):
        """Hits on the line through [a] and [b]: points a + t b, then b."""
        za, zb = Poly.linear(A.field, a), Poly.linear(A.field, b)
        ranks = _kernels.line_ranks(phi(za).data, phi(zb).data, p)
        out = []
        for t in np.flatnonzero(ranks < src):
            out.append(tuple(int(x) for x in ((a + t * b) % p if t < p else b)))
        return out, bool((ranks < src).all())

    def random_vec(rng):
        return np.array(random_linear(A, rng).to_vector(), dtype=np.int64)

    lines = []
    for i in range(samples):
        rng = stream(seed, "locus_scan", mode, i)
        if mode == "line":
            while True:
                a, b = random_vec(rng), random_vec(rng)
                if Subspace.span(A.field, n, np.array([a, b])).dim == 2:
                    break
            hits, singular = scan(a, b)
            lines.append(LineHits(i, p + 1, tuple(hits), singular))
            continue
        while True:
            a, b, c = random_vec(rng), random_vec(rng), random_vec(rng)
            if Subspace.span(A.field, n, np.array([a, b, c])).dim == 3:
                break
        hits, singular = [], True
        if p * p + p + 1 <= plane_budget:
            # (1, t, u) then (0, 1, u) then (0, 0, 1)
            for u in range(p):
                h, sing = scan((a + u * c) % p, b)
                hits.extend(x for x in h if x != tuple(int(v) for v in b))
                singular &= sing
            h, sing = scan(b, c)
            hits.extend(h)
            singular &= sing
            points = p * p + p + 1
        else:
            points = 0
            for _ in range(lines_per_plane):
                coeffs = rng.integers(0, p, (2, 3))
                u = (coeffs[0, 0] * a + coeffs[0, 1] * b + coeffs[0, 2] * c) % p
                v = (coeffs[1, 0] * a + coeffs[1, 1] * b + coeffs[1, 2] * c) % p
                if Subspace.span(A.field, n, np.array([u, v])).dim < 2:
                    continue
                h, sing = scan(u, v)
                hits.extend(h)
                singular &= sing
                points += p + 1
        lines.append(LineHits(i, points, tuple(hits), singular and points > 0))

    pairs, truncated, notes = [], False, []
    if k == A.s:
        for line in lines:
            for h in line.hits:
                if len(pairs) >= max_pairs:
                    truncated = True
                    break
                pairs.extend(kernel_pairs(A, Poly.linear(A.field, h), limit=max_pairs - len(pairs)))
    else:
        notes.append(f"degree {k} differs from the critical degree {A.s}; no pairs harvested")
    return LocusScan(mode, k, square, bound, tuple(lines), tuple(pairs), truncated, tuple(notes))


# --------------------------------------------------------------------------
# structural checks on kernel pairs


@dataclass(frozen=True)
class CokernelCheck:
    k: int
    coker: int
    kernel: int
    holds: bool

    def to_dict(self) -> dict:
        return {"k": self.k, "coker": self.coker, "kernel": self.kernel, "holds": self.holds}


def cokernel_duality_check(A: Algebra, Q, k: int | None = None) -> CokernelCheck:
    """``dim coker(mu_Q: A_k -> A_{k+j}) = dim ker(mu_Q: A_{M-k-j} -> A_{M-k})``.

    The default k = M - j - 1 puts the kernel on ``A_1``, i.e. ``Z(Q)``.
    """
    _require_regular(A, "cokernel_duality_check")
    Q = as_poly(A, Q)
    if A.element(Q).is_zero():
        raise MalformedInputError("Q must have a nonzero class")
    j = Q.degree
    if k is None:
        k = A.M - j - 1
    if not 0 <= k <= A.M - j:
        raise DegreeError(f"k must lie in 0..{A.M - j}")
    coker = A.hf(k + j) - rank(mult_map(A, Q, k))
    dual = A.M - k - j
    kernel = A.hf(dual) - rank(mult_map(A, Q, dual))
    return CokernelCheck(k, coker, kernel, coker == kernel)


@dataclass(frozen=True)
class BoundCheck:
    holds: bool
    checked: int
    max_dim: int
    vacuous: bool

    def to_dict(self) -> dict:
        return {"holds": self.holds, "checked": self.checked, "max_dim": self.max_dim,
                "vacuous": self.vacuous}


def _require_m4_d2(A: Algebra, what: str):
    if (A.m, A.d) != (4, 2):
        raise UnsupportedError(f"{what} is stated for m = 4, d = 2")


def vertex_bound_check(A: Algebra, pairs) -> BoundCheck:
    """``dim Z(Q) <= 2`` for every pair with a nonzero Q."""
    _require_m4_d2(A, "vertex_bound_check")
    dims = [Z_of_Q(A, pr.Q).dim for pr in pairs if not pr.Q.is_zero()]
    return BoundCheck(all(x <= 2 for x in dims), len(dims), max(dims, default=0), not dims)


@dataclass(frozen=True)
class InclusionCheck:
    holds: bool
    subspace_dim: int
    square_zero: bool | None

    def to_dict(self) -> dict:
        return {"holds": self.holds, "subspace_dim": self.subspace_dim, "square_zero": self.square_zero}


def kernel_inclusion_check(A: Algebra, pair: KernelPair) -> InclusionCheck:
    """``Z(Q) * A_{s-1}`` lies in the kernel of ``mu_Q: A_s -> A_{2s}``.

    Whether ``Q^2 = 0`` is reported alongside, never asserted.
    """
    _require_regular(A, "kernel_inclusion_check")
    Q = A.lift(pair.Q)
    s = A.s
    if s < 1 or 2 * s > A.up_to:
        raise DegreeError("needs 1 <= s and 2s within the built range")
    Z = Z_of_Q(A, Q)
    gens = []
    for row in Z.basis.data:
        z = A.lift(A.element_from_coords(1, row))
        for mono in A.standard_monomials(s - 1):
            gens.append(A.normal_form((z * Poly.monomial(A.field, mono)).to_vector(), s))
    sub = Subspace.span(A.field, A.hf(s), np.array(gens, dtype=A.field.dtype).reshape(-1, A.hf(s)))
    image = mult_map(A, Q, s) @ sub.basis.T if sub.dim else None
    holds = image is None or image.is_zero()
    square = A.element(Q * Q).is_zero()
    return InclusionCheck(holds, sub.dim, square)


@dataclass(frozen=True)
class PairSpan:
    z: tuple
    w: tuple
    image_dim: int
    intersection_dim: int


@dataclass(frozen=True)
class PairSpanReport:
    pairs: tuple[PairSpan, ...]
    bound: int
    violations: int
    consistent: bool

    @property
    def holds(self) -> bool:
        return self.violations == 0 and self.consistent

    @property
    def min_image(self) -> int:
        return min(x.image_dim for x in self.pairs)

    @property
    def max_intersection(self) -> int:
        return max(x.intersection_dim for x in self.pairs)

    def to_dict(self) -> dict:
        return {"pairs": len(self.pairs), "bound": self.bound, "violations": self.violations,
                "consistent": self.consistent, "min_image": self.min_image,
                "max_intersection": self.max_intersection}


def pair_span_check(A: Algebra, samples: int = 1000, seed: int = 0, extra=()) -> PairSpanReport:
    """``dim <z,w>A_1 >= 2m - 1`` and ``dim(<z,w>U* cap I_2) <= 2`` over sampled pairs.

    Coordinate pairs come first, then ``extra`` pairs, then random pairs
    until ``samples`` pairs were tested.  The two numbers must add up to 2m+1.
    """
    if A.d != 2:
        raise UnsupportedError("pair_span_check needs d = 2")
    _require_regular(A, "pair_span_check")
    n, field = A.nvars, A.field
    x = [Poly.variable(field, n, i) for i in range(n)]
    candidates = [(x[i], x[j]) for i in range(n) for j in range(i + 1, n)]
    candidates += [(as_poly(A, z), as_poly(A, w)) for z, w in extra]
    rng = stream(seed, "pair_spans")
    out, violations, consistent = [], 0, True
    bound = 2 * A.m - 1
    while len(out) < samples:
        if candidates:
            z, w = candidates.pop(0)
        else:
            z, w = random_linear(A, rng), random_linear(A, rng)
        if Subspace.span(field, n, [z.to_vector(), w.to_vector()]).dim != 2:
            continue
        image = rank(hstack([mult_map(A, z, 1), mult_map(A, w, 1)]))
        inter = upsilon_probe(A, z, w)
        violations += image < bound or inter > 2
        consistent &= image + inter == 2 * A.m + 1
        out.append(PairSpan(tuple(z.to_vector()), tuple(w.to_vector()), image, inter))
    return PairSpanReport(tuple(out), bound, violations, consistent)


@dataclass(frozen=True)
class SpanCheck:
    holds: bool
    v_dim: int
    span_dim: int
    target_dim: int

    def to_dict(self) -> dict:
        return {"holds": self.holds, "v_dim": self.v_dim, "span_dim": self.span_dim,
                "target_dim": self.target_dim}


def vanishing_span_check(A: Algebra, point) -> SpanCheck:
    """``V * A_1 = A_2`` for V the linear forms vanishing at the point."""
    if A.d != 2:
        raise UnsupportedError("vanishing_span_check needs d = 2")
    field, n = A.field, A.nvars
    pt = [field(c) for c in point]
    if len(pt) != n or not any(pt):
        raise MalformedInputError("need a nonzero point with one coordinate per variable")
    V = kernel_basis(Matrix(field, field.array([pt])))
    gens = []
    for row in V.basis.data:
        v = Poly.linear(field, row)
        assert evaluate(v, pt) == 0
        for mono in monomial_basis(n, 1):
            gens.append(A.normal_form((v * Poly.monomial(field, mono)).to_vector(), 2))
    span = Subspace.span(field, A.hf(2), np.array(gens, dtype=field.dtype).reshape(-1, A.hf(2)))
    return SpanCheck(span.dim == A.hf(2), V.dim, span.dim, A.hf(2))


def pair_product_probe(A: Algebra, z) -> list[dict]:
    """For Q, Q' in the basis of ``Q_of_z(z)``: whether ``QQ' = 0`` in ``A_2s``.  Informational."""
    kernel = Q_of_z(A, z)
    if 2 * A.s > A.up_to:
        raise DegreeError("A_2s is outside the built range")
    qs = [A.lift(A.element_from_coords(A.s, row)) for row in kernel.basis.data]
    out = []
    for i in range(len(qs)):
        for j in range(i, len(qs)):
            out.append({"i": i, "j": j, "zero": A.element(qs[i] * qs[j]).is_zero()})
    return out
