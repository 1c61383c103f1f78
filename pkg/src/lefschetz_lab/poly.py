"""Homogeneous polynomials with exact coefficients.

A polynomial lives on one of two sides.  ``operator`` polynomials are written
in ``x0..xm`` and are elements of the symmetric algebra of U*; ``target``
polynomials are written in ``u0..um`` and are elements of the symmetric
algebra of U.  Operators act on targets by differentiation, ``x_i`` acting as
``d/du_i``.

Monomials of a fixed degree are ordered graded-lexicographically with
``x0 > x1 > ... > xm``; this order indexes every coefficient vector and
every matrix column in the package.
"""
from __future__ import annotations

import re
from functools import lru_cache
from itertools import combinations_with_replacement
from math import comb, factorial
from typing import Mapping, Sequence

import numpy as np

from lefschetz_lab.errors import DegreeError, FieldMismatchError, MalformedInputError
from lefschetz_lab.linalg import FieldSpec

OPERATOR = "operator"
TARGET = "target"
_LETTER = {OPERATOR: "x", TARGET: "u"}
_SIDE_OF = {"x": OPERATOR, "u": TARGET}
_FACTOR_RE = re.compile(r"^([xu])(\d+)(?:\^(\d+))?$")
_COEF_RE = re.compile(r"^\d+(?:/\d+)?$")

Exps = tuple[int, ...]


@lru_cache(maxsize=None)
def monomial_basis(nvars: int, degree: int) -> tuple[Exps, ...]:
    """All exponent vectors of ``degree`` in ``nvars`` variables, graded-lex descending."""
    if nvars < 1 or degree < 0:
        raise DegreeError(f"no monomials for nvars={nvars}, degree={degree}")
    out = []
    for combo in combinations_with_replacement(range(nvars), degree):
        e = [0] * nvars
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    return tuple(out)


@lru_cache(maxsize=None)
def monomial_index(nvars: int, degree: int) -> dict[Exps, int]:
    return {e: i for i, e in enumerate(monomial_basis(nvars, degree))}


def basis_size(nvars: int, degree: int) -> int:
    return comb(nvars - 1 + degree, degree) if degree >= 0 else 0


@lru_cache(maxsize=None)
def _falling(beta: Exps, alpha: Exps) -> int:
    out = 1
    for b, a in zip(beta, alpha):
        out *= factorial(b) // factorial(b - a)
    return out


def monomial_weight(exps: Exps) -> int:
    """Pairing of ``x^a`` with ``u^a``: the product of the factorials of the exponents."""
    out = 1
    for e in exps:
        out *= factorial(e)
    return out


class Poly:
    """Homogeneous polynomial; treat as immutable.

    ``terms`` maps exponent tuples to nonzero field elements.  The zero
    polynomial keeps its degree so degree preconditions stay decidable.
    """

    __slots__ = ("field", "nvars", "degree", "terms", "side")

    def __init__(self, field: FieldSpec, nvars: int, degree: int,
                 terms: Mapping[Sequence[int], object] | None = None, side: str = OPERATOR):
        if side not in _LETTER:
            raise MalformedInputError(f"unknown side {side!r}")
        if nvars < 1 or degree < 0:
            raise DegreeError(f"bad shape nvars={nvars}, degree={degree}")
        clean: dict[Exps, object] = {}
        for exps, coef in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != nvars or any(e < 0 for e in exps):
                raise MalformedInputError(f"bad exponent vector {exps} for {nvars} variables")
            if sum(exps) != degree:
                raise DegreeError(f"monomial {exps} is not of degree {degree}")
            c = field(coef)
            if exps in clean:
                c = field(clean[exps] + c)
            if c != 0:
                clean[exps] = c
            else:
                clean.pop(exps, None)
        self.field = field
        self.nvars = nvars
        self.degree = degree
        self.side = side
        self.terms = {e: clean[e] for e in monomial_basis(nvars, degree) if e in clean} \
            if len(clean) > 1 else clean

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, field: FieldSpec, nvars: int, degree: int, side: str = OPERATOR) -> "Poly":
        return cls(field, nvars, degree, {}, side)

    @classmethod
    def monomial(cls, field: FieldSpec, exps: Sequence[int], coef=1, side: str = OPERATOR) -> "Poly":
        exps = tuple(exps)
        return cls(field, len(exps), sum(exps), {exps: coef}, side)

    @classmethod
    def constant(cls, field: FieldSpec, nvars: int, value=1, side: str = OPERATOR) -> "Poly":
        return cls(field, nvars, 0, {(0,) * nvars: value}, side)

    @classmethod
    def linear(cls, field: FieldSpec, coeffs: Sequence, side: str = OPERATOR) -> "Poly":
        n = len(coeffs)
        return cls(field, n, 1, {tuple(int(i == j) for j in range(n)): c for i, c in enumerate(coeffs)}, side)

    @classmethod
    def variable(cls, field: FieldSpec, nvars: int, i: int, side: str = OPERATOR) -> "Poly":
        return cls.monomial(field, tuple(int(i == j) for j in range(nvars)), 1, side)

    @classmethod
    def from_vector(cls, field: FieldSpec, nvars: int, degree: int, vec, side: str = OPERATOR) -> "Poly":
        basis = monomial_basis(nvars, degree)
        vec = list(vec)
        if len(vec) != len(basis):
            raise MalformedInputError(f"vector of length {len(vec)} for {len(basis)} monomials")
        return cls(field, nvars, degree, {e: c for e, c in zip(basis, vec) if c != 0}, side)

    # -- views --------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, exps: Sequence[int]):
        return self.terms.get(tuple(exps), self.field.zero)

    def to_vector(self) -> np.ndarray:
        """Dense coefficient vector in graded-lex order."""
        idx = monomial_index(self.nvars, self.degree)
        vec = self.field.zeros(len(idx))
        for e, c in self.terms.items():
            vec[idx[e]] = c
        return vec

    def with_side(self, side: str) -> "Poly":
        return Poly(self.field, self.nvars, self.degree, self.terms, side)

    def _check(self, other: "Poly"):
        if not isinstance(other, Poly):
            raise MalformedInputError(f"expected Poly, got {type(other).__name__}")
        if other.field != self.field:
            raise FieldMismatchError(f"{self.field} vs {other.field}")
        if other.nvars != self.nvars:
            raise MalformedInputError(f"{self.nvars} vs {other.nvars} variables")

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: "Poly") -> "Poly":
        self._check(other)
        if other.side != self.side:
            raise MalformedInputError("cannot add operator and target polynomials")
        if other.degree != self.degree:
            raise DegreeError(f"cannot add degrees {self.degree} and {other.degree}")
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, 0) + c
        return Poly(self.field, self.nvars, self.degree, terms, self.side)

    def __neg__(self) -> "Poly":
        return self.scale(-1)

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def scale(self, c) -> "Poly":
        c = self.field(c)
        return Poly(self.field, self.nvars, self.degree,
                    {e: v * c for e, v in self.terms.items()}, self.side)

    def __mul__(self, other):
        if isinstance(other, Poly):
            return multiply(self, other)
        return self.scale(other)

    __rmul__ = scale

    def __pow__(self, j: int) -> "Poly":
        return power(self, j)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly):
            return NotImplemented
        return (self.field == other.field and self.nvars == other.nvars
                and self.degree == other.degree and self.side == other.side
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.field, self.nvars, self.degree, self.side,
                     tuple(sorted(self.terms.items()))))

    # -- text ---------------------------------------------------------------

    def to_text(self) -> str:
        """``c*x0^a0*...`` terms in graded-lex order; ``0`` for the zero polynomial."""
        if not self.terms:
            return "0"
        letter = _LETTER[self.side]
        out = []
        for exps, coef in self.terms.items():
            coef_text = self.field.format(coef)
            neg = coef_text.startswith("-")
            coef_text = coef_text.lstrip("-")
            factors = [f"{letter}{i}" if e == 1 else f"{letter}{i}^{e}"
                       for i, e in enumerate(exps) if e]
            if coef_text != "1" or not factors:
                factors.insert(0, coef_text)
            term = "*".join(factors)
            if not out:
                out.append(f"-{term}" if neg else term)
            else:
                out.append(f" - {term}" if neg else f" + {term}")
        return "".join(out)

    @classmethod
    def parse(cls, text: str, field: FieldSpec, nvars: int, degree: int | None = None,
              side: str | None = None) -> "Poly":
        """Inverse of :meth:`to_text`."""
        compact = text.replace(" ", "")
        if not compact:
            raise MalformedInputError("empty polynomial text")
        if compact[0] not in "+-":
            compact = "+" + compact
        pieces = re.findall(r"([+-])([^+-]+)", compact)
        if "".join(s + t for s, t in pieces) != compact:
            raise MalformedInputError(f"bad polynomial text {text!r}")
        terms: dict[Exps, object] = {}
        for sign, body in pieces:
            coef = field.one
            exps = [0] * nvars
            for k, factor in enumerate(body.split("*")):
                m = _FACTOR_RE.match(factor)
                if m:
                    letter, idx, e = m.group(1), int(m.group(2)), int(m.group(3) or 1)
                    if idx >= nvars:
                        raise MalformedInputError(f"variable {letter}{idx} out of range")
                    if side is None:
                        side = _SIDE_OF[letter]
                    elif _SIDE_OF[letter] != side:
                        raise MalformedInputError("mixed x and u variables")
                    exps[idx] += e
                elif k == 0 and _COEF_RE.match(factor):
                    coef = field.parse_scalar(factor)
                else:
                    raise MalformedInputError(f"bad factor {factor!r} in {text!r}")
            if sign == "-":
                coef = field(-coef)
            key = tuple(exps)
            terms[key] = field(terms.get(key, 0) + coef)
        if degree is None:
            nonzero = {sum(e) for e, c in terms.items() if c != 0}
            if len(nonzero) != 1:
                raise MalformedInputError(f"cannot infer a single degree from {text!r}")
            degree = nonzero.pop()
        elif any(sum(e) != degree for e, c in terms.items() if c != 0):
            raise DegreeError(f"{text!r} is not homogeneous of degree {degree}")
        terms = {e: c for e, c in terms.items() if c != 0}
        return cls(field, nvars, degree, terms, side or OPERATOR)

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"Poly({self.to_text()!r}, deg={self.degree}, {self.side}, {self.field})"


def multiply(f: Poly, g: Poly) -> Poly:
    f._check(g)
    if f.side != g.side:
        raise MalformedInputError("cannot multiply operator and target polynomials")
    terms: dict[Exps, object] = {}
    for a, c in f.terms.items():
        for b, e in g.terms.items():
            key = tuple(x + y for x, y in zip(a, b))
            terms[key] = terms.get(key, 0) + c * e
    return Poly(f.field, f.nvars, f.degree + g.degree, terms, f.side)


def power(L: Poly, j: int) -> Poly:
    """``L**j`` for a linear form, by multinomial expansion."""
    if L.degree != 1:
        raise DegreeError(f"power() expects a linear form, got degree {L.degree}")
    if j < 0:
        raise DegreeError("negative power")
    coeffs = [L.coefficient(tuple(int(i == k) for k in range(L.nvars))) for i in range(L.nvars)]
    terms = {}
    jfact = factorial(j)
    for exps in monomial_basis(L.nvars, j):
        c = jfact
        for e in exps:
            c //= factorial(e)
        val = L.field(c)
        for ci, e in zip(coeffs, exps):
            if e:
                val = val * ci ** e
        terms[exps] = val
    return Poly(L.field, L.nvars, j, terms, L.side)


def differentiate(op: Poly, tgt: Poly) -> Poly:
    """Apply the operator ``op`` to ``tgt``: ``x^a`` acts as the partial derivative ``d^a/du^a``."""
    op._check(tgt)
    if op.side != OPERATOR or tgt.side != TARGET:
        raise MalformedInputError("differentiate needs an operator and a target polynomial")
    if tgt.degree < op.degree:
        raise DegreeError(f"cannot apply degree {op.degree} to degree {tgt.degree}")
    terms: dict[Exps, object] = {}
    for a, c in op.terms.items():
        for b, e in tgt.terms.items():
            if all(x <= y for x, y in zip(a, b)):
                key = tuple(y - x for x, y in zip(a, b))
                terms[key] = terms.get(key, 0) + c * e * _falling(b, a)
    return Poly(op.field, op.nvars, tgt.degree - op.degree, terms, TARGET)


def pairing(op: Poly, tgt: Poly):
    """The perfect pairing between operators and targets of equal degree."""
    if op.degree != tgt.degree:
        raise DegreeError(f"pairing needs equal degrees, got {op.degree} and {tgt.degree}")
    return differentiate(op, tgt).coefficient((0,) * op.nvars)


def evaluate(f: Poly, point: Sequence):
    """Substitute ``point`` for the variables of ``f``."""
    if len(point) != f.nvars:
        raise MalformedInputError(f"point of length {len(point)} for {f.nvars} variables")
    pt = [f.field(x) for x in point]
    total = f.field.zero
    for exps, c in f.terms.items():
        term = c
        for x, e in zip(pt, exps):
            if e:
                term = term * x ** e
        total = total + term
    return f.field(total)
