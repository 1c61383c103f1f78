"""Graded artinian quotients ``A = S/I`` for m+1 forms of degree d in m+1 variables.

Each graded piece ``A_k`` is built from the span of the multiples
``monomial * f_i`` in degree k.  Row reduction in graded-lex column order
fixes the basis of ``A_k``: the standard monomials are the non-pivot columns,
and the projector sends a coefficient vector of degree k to its coordinates
on them.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field as dc_field
from math import ceil, comb
from typing import Sequence

import numpy as np

from lefschetz_lab.errors import DegreeError, MalformedInputError, PresentationError, UnsupportedError
from lefschetz_lab.linalg import FieldSpec, Matrix, Subspace, rank, rref, vstack, _matmul
from lefschetz_lab.poly import OPERATOR, Poly, monomial_basis, monomial_index


def socle_degree(m: int, d: int) -> int:
    return (m + 1) * (d - 1)


def critical_degree(m: int, d: int) -> int:
    """``ceil(M/2) - 1``: injectivity of a general linear form here gives the WLP."""
    return ceil(socle_degree(m, d) / 2) - 1


def koszul_hf(m: int, d: int, k: int) -> int:
    """Coefficient of ``t^k`` in ``((1 - t^d) / (1 - t))^(m+1)``."""
    if k < 0:
        return 0
    total = 0
    for i in range(m + 2):
        rest = k - i * d
        if rest < 0:
            break
        total += (-1) ** i * comb(m + 1, i) * comb(m + rest, m)
    return total


# --------------------------------------------------------------------------
# instances


def _check_shape(m: int, d: int, field: FieldSpec):
    if m < 1:
        raise PresentationError(f"need m >= 1, got {m}")
    if d < 2:
        raise PresentationError(f"need d >= 2, got {d}")
    if field.is_prime and field.p <= socle_degree(m, d):
        raise PresentationError(
            f"p={field.p} must exceed the socle degree (m+1)(d-1)={socle_degree(m, d)}")


@dataclass(frozen=True)
class Instance:
    """Presentation data: m, d, the field, and the m+1 generator forms."""

    m: int
    d: int
    field: FieldSpec
    generators: tuple[Poly, ...]

    def __post_init__(self):
        m, d = self.m, self.d
        object.__setattr__(self, "generators", tuple(self.generators))
        _check_shape(m, d, self.field)
        if len(self.generators) != m + 1:
            raise PresentationError(f"need {m + 1} generators, got {len(self.generators)}")
        for f in self.generators:
            if f.field != self.field or f.nvars != m + 1 or f.degree != d or f.side != OPERATOR:
                raise PresentationError(f"generator {f!r} is not a degree-{d} form in {m + 1} variables")
        vecs = Matrix(self.field, np.array([f.to_vector() for f in self.generators]))
        if rank(vecs) != m + 1:
            raise PresentationError("generators are linearly dependent")

    @property
    def nvars(self) -> int:
        return self.m + 1

    @property
    def socle_degree(self) -> int:
        return socle_degree(self.m, self.d)

    @property
    def critical_degree(self) -> int:
        return critical_degree(self.m, self.d)

    @classmethod
    def monomial(cls, m: int, d: int, field: FieldSpec) -> "Instance":
        """The monomial complete intersection ``(x0^d, ..., xm^d)``."""
        gens = [Poly.monomial(field, tuple(d * int(i == j) for j in range(m + 1))) for i in range(m + 1)]
        return cls(m, d, field, tuple(gens))

    @classmethod
    def random(cls, m: int, d: int, field: FieldSpec, rng: np.random.Generator) -> "Instance":
        """Uniformly random coefficient forms; redraws dependent tuples."""
        _check_shape(m, d, field)
        monos = monomial_basis(m + 1, d)
        while True:
            gens = [Poly(field, m + 1, d, dict(zip(monos, field.random_elements(rng, len(monos)))))
                    for _ in range(m + 1)]
            try:
                return cls(m, d, field, tuple(gens))
            except PresentationError:
                continue

    @classmethod
    def from_texts(cls, m: int, d: int, field: FieldSpec, texts: Sequence[str]) -> "Instance":
        return cls(m, d, field, tuple(Poly.parse(t, field, m + 1, d) for t in texts))

    # -- interchange ------------------------------------------------------

    def to_dict(self) -> dict:
        fld = {"kind": self.field.kind}
        if self.field.is_prime:
            fld["p"] = self.field.p
        return {
            "m": self.m,
            "d": self.d,
            "field": fld,
            "generators": [
                [{"exps": list(e), "coef": self.field.format(c)} for e, c in f.terms.items()]
                for f in self.generators
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Instance":
        try:
            m, d = data["m"], data["d"]
            fld = data["field"]
            field = FieldSpec(fld["kind"], fld.get("p"))
            if not isinstance(m, int) or not isinstance(d, int):
                raise MalformedInputError("m and d must be integers")
            gens = []
            for terms in data["generators"]:
                poly_terms = {}
                for t in terms:
                    exps = tuple(t["exps"])
                    if exps in poly_terms:
                        raise MalformedInputError(f"repeated monomial {list(exps)}")
                    if not isinstance(t["coef"], str):
                        raise MalformedInputError("coefficients must be strings")
                    poly_terms[exps] = field.parse_scalar(t["coef"])
                gens.append(Poly(field, m + 1, d, poly_terms))
        except (KeyError, TypeError) as exc:
            raise MalformedInputError(f"bad instance object: {exc}") from exc
        return cls(m, d, field, tuple(gens))

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def loads(cls, text: str) -> "Instance":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MalformedInputError(f"instance file is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise MalformedInputError("instance file must hold an object")
        return cls.from_dict(data)

    def digest(self) -> str:
        canon = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()


# --------------------------------------------------------------------------
# the quotient algebra


@dataclass(frozen=True)
class ElementClass:
    """An element of ``A_k`` in coordinates on the standard monomials."""

    degree: int
    coords: tuple

    def is_zero(self) -> bool:
        return not any(self.coords)


@dataclass(frozen=True)
class GradedPiece:
    degree: int
    monomials: tuple
    ideal: Subspace
    pivots: tuple[int, ...]
    standard: tuple[int, ...]
    projector: Matrix

    @property
    def hf(self) -> int:
        return len(self.standard)

    @property
    def standard_monomials(self) -> tuple:
        return tuple(self.monomials[i] for i in self.standard)


def _multiples_matrix(instance: Instance, k: int) -> Matrix:
    field, n, d = instance.field, instance.nvars, instance.d
    idx = monomial_index(n, k)
    if k < d:
        return Matrix.zeros(field, 0, len(idx))
    shifts = monomial_basis(n, k - d)
    data = field.zeros(((instance.m + 1) * len(shifts), len(idx)))
    row = 0
    for f in instance.generators:
        for s in shifts:
            for e, c in f.terms.items():
                data[row, idx[tuple(a + b for a, b in zip(e, s))]] = c
            row += 1
    return Matrix(field, data)


def _piece(instance: Instance, k: int) -> GradedPiece:
    field = instance.field
    monos = monomial_basis(instance.nvars, k)
    n = len(monos)
    red, pivots = rref(_multiples_matrix(instance, k))
    r = len(pivots)
    basis = Matrix(field, red.data[:r].copy())
    pivset = set(pivots)
    standard = tuple(c for c in range(n) if c not in pivset)
    proj = field.zeros((len(standard), n))
    for i, c in enumerate(standard):
        proj[i, c] = field.one
    for row, pc in enumerate(pivots):
        for i, c in enumerate(standard):
            proj[i, pc] = field(-basis.data[row, c])
    return GradedPiece(k, monos, Subspace(field, n, basis), tuple(pivots), standard, Matrix(field, proj))


@dataclass(frozen=True)
class Algebra:
    instance: Instance
    up_to: int
    pieces: tuple[GradedPiece, ...] = dc_field(repr=False)

    @property
    def field(self) -> FieldSpec:
        return self.instance.field

    @property
    def m(self) -> int:
        return self.instance.m

    @property
    def d(self) -> int:
        return self.instance.d

    @property
    def nvars(self) -> int:
        return self.instance.nvars

    @property
    def M(self) -> int:
        return self.instance.socle_degree

    @property
    def s(self) -> int:
        return self.instance.critical_degree

    def piece(self, k: int) -> GradedPiece:
        if k < 0 or k > self.up_to:
            raise DegreeError(f"degree {k} outside the built range 0..{self.up_to}")
        return self.pieces[k]

    def hf(self, k: int) -> int:
        if k < 0:
            return 0
        if k > self.up_to:
            if self.regular and k > self.M:
                return 0
            raise DegreeError(f"degree {k} was not materialized")
        return self.pieces[k].hf

    @property
    def hilbert_function(self) -> tuple[int, ...]:
        return tuple(p.hf for p in self.pieces)

    @property
    def regular(self) -> bool:
        return regularity(self).regular

    def standard_monomials(self, k: int) -> tuple:
        return self.piece(k).standard_monomials

    def normal_form(self, vec, k: int) -> np.ndarray:
        """Coordinates in ``A_k`` of a coefficient vector of degree k."""
        piece = self.piece(k)
        col = self.field.array(np.asarray(vec, dtype=object).reshape(-1, 1)) \
            if not (isinstance(vec, np.ndarray) and vec.dtype == np.int64) else vec.reshape(-1, 1)
        return _matmul(self.field, piece.projector.data, col)[:, 0]

    def element(self, f: Poly) -> ElementClass:
        if f.nvars != self.nvars or f.field != self.field:
            raise MalformedInputError("polynomial does not belong to this algebra")
        coords = self.normal_form(f.to_vector(), f.degree)
        return ElementClass(f.degree, tuple(self.field(x) for x in coords))

    def lift(self, e: ElementClass) -> Poly:
        monos = self.standard_monomials(e.degree)
        if len(e.coords) != len(monos):
            raise MalformedInputError(f"coordinates of length {len(e.coords)} for HF={len(monos)}")
        return Poly(self.field, self.nvars, e.degree, dict(zip(monos, e.coords)))

    def element_from_coords(self, k: int, coords) -> ElementClass:
        coords = tuple(self.field(x) for x in coords)
        if len(coords) != self.hf(k):
            raise MalformedInputError(f"coordinates of length {len(coords)} for HF({k})={self.hf(k)}")
        return ElementClass(k, coords)

    def multiply(self, a: ElementClass, b: ElementClass) -> ElementClass:
        return self.element(self.lift(a) * self.lift(b))


def build(instance: Instance, up_to: int | None = None) -> Algebra:
    """Materialize ``A_k`` for ``k = 0..up_to`` (default: socle degree + 1)."""
    if up_to is None:
        up_to = instance.socle_degree + 1
    if up_to < 0:
        raise DegreeError("up_to must be nonnegative")
    pieces = tuple(_piece(instance, k) for k in range(up_to + 1))
    return Algebra(instance, up_to, pieces)


# --------------------------------------------------------------------------
# regularity


@dataclass(frozen=True)
class Regularity:
    regular: bool
    witness_degree: int | None = None

    def __str__(self) -> str:
        return "regular" if self.regular else f"not_regular({self.witness_degree})"


def regularity(A: Algebra) -> Regularity:
    """Regular iff HF agrees with the Koszul prediction through degree M+1."""
    top = A.M + 1
    if A.up_to < top:
        raise DegreeError(f"regularity needs degrees up to {top}, algebra built to {A.up_to}")
    for k in range(top + 1):
        if A.pieces[k].hf != koszul_hf(A.m, A.d, k):
            return Regularity(False, k)
    return Regularity(True)


def is_regular_sequence(instance: Instance) -> Regularity:
    return regularity(build(instance))


# --------------------------------------------------------------------------
# multiplication maps and duality


def as_poly(A: Algebra, f) -> Poly:
    if isinstance(f, ElementClass):
        return A.lift(f)
    if isinstance(f, Poly):
        if f.nvars != A.nvars or f.field != A.field or f.side != OPERATOR:
            raise MalformedInputError("polynomial does not belong to this algebra")
        return f
    raise MalformedInputError(f"expected Poly or ElementClass, got {type(f).__name__}")


def mult_map(A: Algebra, f, k: int) -> Matrix:
    """Matrix of ``A_k -> A_{k+j}``, ``a -> f a``, columns indexed by standard monomials."""
    f = as_poly(A, f)
    j = f.degree
    if k < 0 or k + j > A.up_to:
        raise DegreeError(f"mult_map needs 0 <= k and k + deg f <= {A.up_to}, got k={k}, deg={j}")
    source, target = A.piece(k), A.piece(k + j)
    idx = monomial_index(A.nvars, k + j)
    vecs = A.field.zeros((len(idx), source.hf))
    for c, mono in enumerate(source.standard_monomials):
        for e, coef in f.terms.items():
            vecs[idx[tuple(a + b for a, b in zip(e, mono))], c] += coef
    if A.field.is_prime:
        vecs %= A.field.p
    return Matrix(A.field, _matmul(A.field, target.projector.data, vecs))


def _require_regular(A: Algebra, what: str):
    if not A.regular:
        raise UnsupportedError(f"{what} needs a regular (complete intersection) algebra")


def duality_pairing(A: Algebra, k: int) -> Matrix:
    """Gram matrix of ``A_k x A_{M-k} -> A_M`` on standard monomial bases."""
    _require_regular(A, "duality_pairing")
    if not 0 <= k <= A.M:
        raise DegreeError(f"k must lie in 0..{A.M}")
    rows = [mult_map(A, Poly.monomial(A.field, mono), A.M - k)
            for mono in A.standard_monomials(k)]
    return vstack(rows, A.field, A.hf(A.M - k))


def symmetry_matrix(A: Algebra, L: Poly) -> Matrix:
    """The bilinear form ``(a, b) -> <a * L * b>`` on ``A_s`` (pairing times mu_L)."""
    _require_regular(A, "symmetry_check")
    if A.M % 2 == 0:
        raise UnsupportedError("symmetry of mu_L at the critical degree needs an odd socle degree")
    return duality_pairing(A, A.s) @ mult_map(A, L, A.s)


def symmetry_check(A: Algebra, L: Poly) -> bool:
    B = symmetry_matrix(A, L)
    return B == B.T
