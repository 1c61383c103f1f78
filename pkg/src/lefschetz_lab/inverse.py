"""Macaulay inverse systems under the differentiation action.

``I^-1_k`` is the annihilator of ``I_k`` inside the degree-k target
polynomials.  For a complete intersection it is generated, as a module over
the operators, by one form ``g`` of the socle degree.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from lefschetz_lab.algebra import Algebra, Instance, as_poly, _require_regular
from lefschetz_lab.errors import DegreeError, MalformedInputError
from lefschetz_lab.linalg import FieldSpec, Matrix, Subspace, kernel_basis
from lefschetz_lab.poly import (
    TARGET,
    Poly,
    differentiate,
    evaluate,
    monomial_basis,
    monomial_weight,
    power,
)


@dataclass(frozen=True)
class InverseSystemSlice:
    degree: int
    basis: Subspace

    @property
    def dim(self) -> int:
        return self.basis.dim

    def polys(self, field: FieldSpec, nvars: int) -> list[Poly]:
        return [Poly.from_vector(field, nvars, self.degree, row, TARGET) for row in self.basis.basis.data]


@dataclass(frozen=True)
class DualSocleGenerator:
    g: Poly


@dataclass(frozen=True)
class VertexSpace:
    space: Subspace
    degenerate: bool


def _annihilator_of_rows(field: FieldSpec, nvars: int, k: int, rows: np.ndarray) -> Subspace:
    """Targets of degree k killed by every operator row (coefficient vectors)."""
    weights = [monomial_weight(e) for e in monomial_basis(nvars, k)]
    n = len(weights)
    if rows.shape[0] == 0:
        return Subspace.full(field, n)
    weighted = field.array(rows * np.array(weights, dtype=object)) if not field.is_prime \
        else (rows * (np.array(weights, dtype=np.int64) % field.p)) % field.p
    return kernel_basis(Matrix(field, weighted))


def annihilator(A: Algebra, k: int) -> InverseSystemSlice:
    if not 0 <= k <= A.up_to:
        raise DegreeError(f"degree {k} outside 0..{A.up_to}")
    piece = A.piece(k)
    return InverseSystemSlice(k, _annihilator_of_rows(A.field, A.nvars, k, piece.ideal.basis.data))


def dual_socle_generator(A: Algebra) -> DualSocleGenerator:
    """The generator g of ``I^-1_M``, normalized to leading graded-lex coefficient 1."""
    _require_regular(A, "dual_socle_generator")
    top = annihilator(A, A.M)
    if top.dim != 1:
        raise DegreeError(f"I^-1_M has dimension {top.dim}, expected 1")
    # reduced echelon row: its first nonzero entry is already 1
    return DualSocleGenerator(Poly.from_vector(A.field, A.nvars, A.M, top.basis.basis.data[0], TARGET))


def derivative_span(A: Algebra, g: Poly, k: int) -> Subspace:
    ops = [Poly.monomial(A.field, e) for e in monomial_basis(A.nvars, k)]
    vecs = [differentiate(op, g).to_vector() for op in ops]
    n = len(monomial_basis(A.nvars, A.M - k))
    return Subspace.span(A.field, n, np.array(vecs, dtype=A.field.dtype).reshape(len(vecs), n))


def derivative_span_check(A: Algebra, k: int, g: Poly | None = None) -> bool:
    """Whether the order-k partials of g span ``I^-1_{M-k}``."""
    _require_regular(A, "derivative_span_check")
    if not 0 <= k <= A.M:
        raise DegreeError(f"k must lie in 0..{A.M}")
    if g is None:
        g = dual_socle_generator(A).g
    return derivative_span(A, g, k) == annihilator(A, A.M - k).basis


def apply_to_socle(A: Algebra, Q, g: Poly | None = None) -> Poly:
    """``Q(g)``: zero exactly when the class of Q vanishes."""
    _require_regular(A, "apply_to_socle")
    Q = as_poly(A, Q)
    if g is None:
        g = dual_socle_generator(A).g
    return differentiate(Q, g)


def vertex_space(A: Algebra, Q, g: Poly | None = None) -> VertexSpace:
    """Linear forms z with ``z(Q(g)) = 0``: the vertex space of the cone ``V(Q(g))``."""
    qg = apply_to_socle(A, Q, g)
    n = A.nvars
    if qg.is_zero():
        return VertexSpace(Subspace.full(A.field, n), True)
    cols = [differentiate(Poly.variable(A.field, n, i), qg).to_vector() for i in range(n)]
    mat = Matrix(A.field, np.array(cols, dtype=A.field.dtype).reshape(n, -1).T.copy())
    return VertexSpace(kernel_basis(mat), False)


def veronese_certificate(instance: Instance, point: Sequence) -> bool:
    """Whether ``p^d`` lies in ``I^-1_d``, i.e. is annihilated by every generator."""
    field, n, d = instance.field, instance.nvars, instance.d
    pt = [field(x) for x in point]
    if len(pt) != n:
        raise MalformedInputError(f"point of length {len(pt)} for {n} variables")
    if not any(pt):
        raise MalformedInputError("the zero vector is not a point")
    rows = np.array([f.to_vector() for f in instance.generators], dtype=field.dtype)
    ann = _annihilator_of_rows(field, n, d, rows)
    pd = power(Poly.linear(field, pt, TARGET), d)
    return ann.contains(pd.to_vector())


def _reduce_coefficient(field: FieldSpec, c, q: int) -> int:
    if field.is_prime:
        return int(c) % q
    if c.denominator % q == 0:
        raise MalformedInputError(f"coefficient {c} has no residue mod {q}")
    return c.numerator * pow(c.denominator, -1, q) % q


def projective_points(nvars: int, q: int):
    """Points of ``P^{n-1}(F_q)`` with first nonzero coordinate 1, in lex order."""
    for lead in range(nvars):
        for tail in itertools.product(range(q), repeat=nvars - lead - 1):
            yield (0,) * lead + (1,) + tail


def count_projective_points(nvars: int, q: int) -> int:
    return (q**nvars - 1) // (q - 1)


def common_zero_scan(instance: Instance, scan_prime: int, budget: int = 2_000_000) -> tuple | None:
    """First common zero over ``F_q`` of the generators reduced mod q, if any.

    Prime-field coefficients are reduced through their integer representatives,
    so unless ``q`` equals the instance modulus the scanned system is a different
    instance.  Finding nothing proves nothing about regularity.
    """
    FieldSpec.prime(scan_prime)  # raises unless q is an odd prime
    n = instance.nvars
    total = count_projective_points(n, scan_prime)
    if total > budget:
        raise MalformedInputError(f"{total} points exceed the scan budget {budget}")
    q = scan_prime
    gens = [{e: _reduce_coefficient(instance.field, c, q) for e, c in f.terms.items()}
            for f in instance.generators]
    for lead in range(n):
        tails = np.array(list(itertools.product(range(q), repeat=n - lead - 1)), dtype=np.int64)
        tails = tails.reshape(q ** (n - lead - 1), n - lead - 1)
        pts = np.zeros((tails.shape[0], n), dtype=np.int64)
        pts[:, lead] = 1
        pts[:, lead + 1:] = tails
        alive = np.ones(pts.shape[0], dtype=bool)
        powers = [np.ones_like(pts)]
        for _ in range(instance.d):
            powers.append(powers[-1] * pts % q)
        for f in gens:
            val = np.zeros(pts.shape[0], dtype=np.int64)
            for e, c in f.items():
                term = np.full(pts.shape[0], c, dtype=np.int64)
                for i, ei in enumerate(e):
                    if ei:
                        term = term * powers[ei][:, i] % q
                val = (val + term) % q
            alive &= val == 0
            if not alive.any():
                break
        hits = np.flatnonzero(alive)
        if hits.size:
            return tuple(int(x) for x in pts[hits[0]])
    return None


def evaluation_certificate(instance: Instance, point: Sequence) -> bool:
    """Direct route: every generator vanishes at the point."""
    return all(evaluate(f, point) == 0 for f in instance.generators)


def pairing_identity_holds(f: Poly, point: Sequence) -> bool:
    """``<f, p^d> = d! f(p)``."""
    field = f.field
    pd = power(Poly.linear(field, list(point), TARGET), f.degree)
    lhs = differentiate(f, pd).coefficient((0,) * f.nvars)
    return lhs == field(math.factorial(f.degree) * evaluate(f, point))
