"""Exact coefficient fields and dense linear algebra over them.

Two fields are supported: the rationals (elements are :class:`fractions.Fraction`)
and odd prime fields ``F_p`` with ``p < 2**31`` (elements are Python ints in
``[0, p)``).  Matrices carry their field; prime-field matrices are stored as
int64 arrays and reduced with the kernels in :mod:`lefschetz_lab._kernels`,
rational matrices are object arrays of ``Fraction`` and are reduced with
sympy's sparse ``DomainMatrix`` over ``QQ``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Integral, Rational
from typing import Iterable, Sequence

import numpy as np
from sympy import isprime
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from lefschetz_lab import _kernels
from lefschetz_lab.errors import FieldMismatchError, MalformedInputError

RATIONAL = "rational"
PRIME = "prime"
DEFAULT_PRIME = 65521
_MAX_MODULUS = 2**31
_SCALAR_RE = re.compile(r"^-?\d+(/\d+)?$")


@dataclass(frozen=True)
class FieldSpec:
    """A coefficient field: ``FieldSpec("rational")`` or ``FieldSpec("prime", p)``."""

    kind: str
    p: int | None = None

    def __post_init__(self):
        if self.kind == RATIONAL:
            if self.p is not None:
                raise MalformedInputError("the rational field takes no modulus")
        elif self.kind == PRIME:
            p = self.p
            if not isinstance(p, Integral) or isinstance(p, bool):
                raise MalformedInputError(f"prime modulus must be an integer, got {p!r}")
            if p < 3 or p % 2 == 0 or not isprime(int(p)):
                raise MalformedInputError(f"modulus must be an odd prime, got {p}")
            if p >= _MAX_MODULUS:
                raise MalformedInputError(f"modulus must be below 2**31, got {p}")
            object.__setattr__(self, "p", int(p))
        else:
            raise MalformedInputError(f"unknown field kind {self.kind!r}")

    @classmethod
    def prime(cls, p: int = DEFAULT_PRIME) -> "FieldSpec":
        return cls(PRIME, p)

    @classmethod
    def rational(cls) -> "FieldSpec":
        return cls(RATIONAL)

    @classmethod
    def parse(cls, text: str) -> "FieldSpec":
        """Parse ``rational`` or ``prime:P``."""
        text = text.strip()
        if text == RATIONAL:
            return cls.rational()
        kind, _, modulus = text.partition(":")
        if kind != PRIME or not modulus.isdigit():
            raise MalformedInputError(f"bad field {text!r}; expected 'rational' or 'prime:P'")
        return cls.prime(int(modulus))

    def __str__(self) -> str:
        return RATIONAL if self.kind == RATIONAL else f"{PRIME}:{self.p}"

    @property
    def is_prime(self) -> bool:
        return self.kind == PRIME

    @property
    def characteristic(self) -> int:
        return self.p if self.is_prime else 0

    @property
    def dtype(self):
        return np.int64 if self.is_prime else object

    @property
    def zero(self):
        return 0 if self.is_prime else Fraction(0)

    @property
    def one(self):
        return 1 if self.is_prime else Fraction(1)

    def __call__(self, value):
        """Coerce ``value`` (int, Fraction, or scalar string) into the field."""
        if isinstance(value, str):
            return self.parse_scalar(value)
        if isinstance(value, (bool, np.bool_)):
            value = int(value)
        if isinstance(value, (Integral, np.integer)):
            return int(value) % self.p if self.is_prime else Fraction(int(value))
        if isinstance(value, Rational):
            value = Fraction(value)
            if not self.is_prime:
                return value
            if value.denominator % self.p == 0:
                raise MalformedInputError(f"{value} has no residue mod {self.p}")
            return value.numerator * pow(value.denominator, -1, self.p) % self.p
        raise MalformedInputError(f"cannot interpret {value!r} as an element of {self}")

    def parse_scalar(self, text: str):
        text = text.strip()
        if not _SCALAR_RE.match(text):
            raise MalformedInputError(f"bad scalar {text!r}")
        value = Fraction(text)
        if self.is_prime and "/" not in text:
            return int(text) % self.p
        return self(value)

    def format(self, value) -> str:
        return str(self(value))

    def inv(self, value):
        value = self(value)
        if value == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(value, -1, self.p) if self.is_prime else 1 / value

    def array(self, rows) -> np.ndarray:
        """Array of coerced entries with this field's dtype (at least 2-D aware)."""
        if self.is_prime:
            arr = np.asarray(rows)
            if arr.dtype.kind in "iu":
                return np.asarray(arr % self.p, dtype=np.int64)
        arr = np.asarray(rows, dtype=object)
        out = np.empty(arr.shape, dtype=self.dtype)
        flat_in, flat_out = arr.reshape(-1), out.reshape(-1)
        for i, x in enumerate(flat_in):
            flat_out[i] = self(x)
        return out

    def zeros(self, shape) -> np.ndarray:
        if self.is_prime:
            return np.zeros(shape, dtype=np.int64)
        out = np.empty(shape, dtype=object)
        out.fill(Fraction(0))
        return out

    def random_elements(self, rng: np.random.Generator, n: int, *, nonzero: bool = False) -> list:
        """Uniform elements of F_p, or integers in [-9, 9] for the rationals."""
        lo, hi = (1 if nonzero else 0, self.p) if self.is_prime else (-9, 10)
        out = []
        while len(out) < n:
            x = int(rng.integers(lo, hi))
            if nonzero and x == 0:
                continue
            out.append(self(x))
        return out


def _reduce(field: FieldSpec, data: np.ndarray) -> np.ndarray:
    return data % field.p if field.is_prime else data


def _matmul(field: FieldSpec, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if not field.is_prime:
        if a.shape[1] == 0:
            return field.zeros((a.shape[0], b.shape[1]))
        return a.dot(b)
    if a.shape[1] * (field.p - 1) ** 2 < 2**63:
        return (a @ b) % field.p
    return ((a.astype(object) @ b.astype(object)) % field.p).astype(np.int64)


class Matrix:
    """Dense matrix over a :class:`FieldSpec`; treat as immutable."""

    __slots__ = ("field", "data")

    def __init__(self, field: FieldSpec, data):
        if not isinstance(field, FieldSpec):
            raise MalformedInputError("Matrix needs a FieldSpec")
        arr = np.asarray(data)
        if arr.ndim != 2:
            raise MalformedInputError(f"matrix data must be 2-D, got shape {arr.shape}")
        if field.is_prime:
            if arr.dtype.kind not in "iuO" and arr.size:
                raise MalformedInputError(f"prime-field matrix cannot hold {arr.dtype} entries")
            if arr.dtype != np.int64:
                arr = field.array(arr) if arr.size else np.zeros(arr.shape, dtype=np.int64)
            else:
                arr = arr % field.p
        else:
            if arr.dtype != object:
                if arr.dtype.kind not in "iu" and arr.size:
                    raise MalformedInputError(f"rational matrix cannot hold {arr.dtype} entries")
                arr = field.array(arr) if arr.size else field.zeros(arr.shape)
            elif arr.size and not all(isinstance(x, Fraction) for x in arr.flat):
                arr = field.array(arr)
        self.field = field
        self.data = arr

    @classmethod
    def from_rows(cls, field: FieldSpec, rows: Sequence[Sequence], ncols: int | None = None) -> "Matrix":
        rows = [list(r) for r in rows]
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise MalformedInputError("ragged matrix rows")
        if not rows:
            return cls(field, field.zeros((0, ncols)))
        return cls(field, field.array(rows))

    @classmethod
    def zeros(cls, field: FieldSpec, rows: int, cols: int) -> "Matrix":
        return cls(field, field.zeros((rows, cols)))

    @classmethod
    def identity(cls, field: FieldSpec, n: int) -> "Matrix":
        data = field.zeros((n, n))
        for i in range(n):
            data[i, i] = field.one
        return cls(field, data)

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def T(self) -> "Matrix":
        return Matrix(self.field, self.data.T.copy())

    def _check(self, other: "Matrix"):
        if not isinstance(other, Matrix):
            raise MalformedInputError(f"expected Matrix, got {type(other).__name__}")
        if other.field != self.field:
            raise FieldMismatchError(f"{self.field} vs {other.field}")

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.cols != other.rows:
            raise MalformedInputError(f"cannot multiply {self.shape} by {other.shape}")
        return Matrix(self.field, _matmul(self.field, self.data, other.data))

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        return Matrix(self.field, _reduce(self.field, self.data + other.data))

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        return Matrix(self.field, _reduce(self.field, self.data - other.data))

    def scale(self, c) -> "Matrix":
        c = self.field(c)
        return Matrix(self.field, _reduce(self.field, self.data * c))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return (
            self.field == other.field
            and self.shape == other.shape
            and bool(np.all(self.data == other.data))
        )

    __hash__ = None

    def tolist(self) -> list[list]:
        return [[x if not self.field.is_prime else int(x) for x in row] for row in self.data]

    def is_zero(self) -> bool:
        return not np.any(self.data != 0)

    def rank(self) -> int:
        return rank(self)

    def __repr__(self) -> str:
        return f"Matrix({self.field}, {self.tolist()})"


def vstack(mats: Sequence[Matrix], field: FieldSpec | None = None, ncols: int | None = None) -> Matrix:
    mats = list(mats)
    if not mats:
        if field is None or ncols is None:
            raise MalformedInputError("vstack of nothing needs field and ncols")
        return Matrix.zeros(field, 0, ncols)
    for m in mats[1:]:
        mats[0]._check(m)
    return Matrix(mats[0].field, np.vstack([m.data for m in mats]))


def hstack(mats: Sequence[Matrix]) -> Matrix:
    mats = list(mats)
    for m in mats[1:]:
        mats[0]._check(m)
    return Matrix(mats[0].field, np.hstack([m.data for m in mats]))


def _as_matrix(M) -> Matrix:
    if not isinstance(M, Matrix):
        raise MalformedInputError(f"expected Matrix, got {type(M).__name__}")
    return M


def _rref_rational(data: np.ndarray) -> tuple[np.ndarray, list[int]]:
    nrows, ncols = data.shape
    if nrows == 0 or ncols == 0:
        return data.copy(), []
    rows = [[QQ(x.numerator, x.denominator) for x in row] for row in data]
    red, pivots = DomainMatrix(rows, (nrows, ncols), QQ).to_sparse().rref()
    out = np.empty((nrows, ncols), dtype=object)
    for i, row in enumerate(red.to_dense().to_list()):
        for j, x in enumerate(row):
            out[i, j] = Fraction(int(x.numerator), int(x.denominator))
    return out, list(pivots)


def rref(M: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form (same shape, zero rows last) and pivot columns."""
    M = _as_matrix(M)
    if M.field.is_prime:
        data, pivots = _kernels.rref(M.data, M.field.p)
    else:
        data, pivots = _rref_rational(M.data)
    return Matrix(M.field, data), pivots


def rank(M: Matrix) -> int:
    M = _as_matrix(M)
    if M.field.is_prime:
        return _kernels.rank(M.data, M.field.p)
    return len(rref(M)[1])


def kernel_basis(M: Matrix) -> "Subspace":
    """Right kernel ``{v : M v = 0}`` as a canonical subspace."""
    M = _as_matrix(M)
    field, n = M.field, M.cols
    red, pivots = rref(M)
    free = [c for c in range(n) if c not in set(pivots)]
    vecs = field.zeros((len(free), n))
    for i, f in enumerate(free):
        vecs[i, f] = field.one
        for r, pc in enumerate(pivots):
            vecs[i, pc] = field(-red.data[r, f])
    return Subspace.span(field, n, vecs)


def determinant(M: Matrix):
    """Determinant of a square matrix by Gaussian elimination (small sizes)."""
    M = _as_matrix(M)
    if M.rows != M.cols:
        raise MalformedInputError("determinant of a non-square matrix")
    field = M.field
    a = [[field(x) for x in row] for row in M.data]
    n, det = M.rows, field.one
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            return field.zero
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = field(-det)
        det = field(det * a[c][c])
        inv = field.inv(a[c][c])
        for r in range(c + 1, n):
            f = field(a[r][c] * inv)
            if f:
                a[r] = [field(x - f * y) for x, y in zip(a[r], a[c])]
    return det


class Subspace:
    """Subspace of ``field^ambient_dim`` held as a reduced echelon basis.

    The basis is canonical, so two subspaces are equal exactly when their
    basis matrices are equal.
    """

    __slots__ = ("field", "ambient_dim", "basis")

    def __init__(self, field: FieldSpec, ambient_dim: int, basis: Matrix):
        self.field = field
        self.ambient_dim = ambient_dim
        self.basis = basis

    @classmethod
    def span(cls, field: FieldSpec, ambient_dim: int, vectors) -> "Subspace":
        if isinstance(vectors, Matrix):
            mat = vectors
        else:
            arr = vectors if isinstance(vectors, np.ndarray) else np.asarray(vectors, dtype=object)
            if arr.size == 0:
                return cls.zero(field, ambient_dim)
            mat = Matrix(field, field.array(arr.reshape(-1, ambient_dim)))
        if mat.field != field:
            raise FieldMismatchError(f"{mat.field} vs {field}")
        if mat.cols != ambient_dim:
            raise MalformedInputError(f"vectors of length {mat.cols} in ambient dimension {ambient_dim}")
        red, pivots = rref(mat)
        return cls(field, ambient_dim, Matrix(field, red.data[: len(pivots)].copy()))

    @classmethod
    def zero(cls, field: FieldSpec, ambient_dim: int) -> "Subspace":
        return cls(field, ambient_dim, Matrix.zeros(field, 0, ambient_dim))

    @classmethod
    def full(cls, field: FieldSpec, ambient_dim: int) -> "Subspace":
        return cls(field, ambient_dim, Matrix.identity(field, ambient_dim))

    @property
    def dim(self) -> int:
        return self.basis.rows

    def vectors(self) -> list[list]:
        return self.basis.tolist()

    def _check(self, other: "Subspace"):
        if self.field != other.field:
            raise FieldMismatchError(f"{self.field} vs {other.field}")
        if self.ambient_dim != other.ambient_dim:
            raise MalformedInputError(f"ambient dimensions differ: {self.ambient_dim} vs {other.ambient_dim}")

    def sum(self, other: "Subspace") -> "Subspace":
        self._check(other)
        return Subspace.span(self.field, self.ambient_dim, vstack([self.basis, other.basis]))

    __add__ = sum

    def intersection(self, other: "Subspace") -> "Subspace":
        self._check(other)
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.field, self.ambient_dim)
        # (a, b) with a.U = b.V
        stacked = hstack([self.basis.T, other.basis.scale(-1).T])
        ker = kernel_basis(stacked)
        coeffs = Matrix(self.field, ker.basis.data[:, : self.dim].copy())
        return Subspace.span(self.field, self.ambient_dim, coeffs @ self.basis)

    __and__ = intersection

    def contains(self, v) -> bool:
        vec = self.field.array(np.asarray(v, dtype=object).reshape(1, -1)) if not isinstance(v, Matrix) else v.data
        if vec.shape[1] != self.ambient_dim:
            raise MalformedInputError(f"vector of length {vec.shape[1]} in ambient dimension {self.ambient_dim}")
        return rank(vstack([self.basis, Matrix(self.field, vec)])) == self.dim

    def contains_subspace(self, other: "Subspace") -> bool:
        self._check(other)
        return self.sum(other).dim == self.dim

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return (
            self.field == other.field
            and self.ambient_dim == other.ambient_dim
            and self.basis == other.basis
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim}, field={self.field})"


def sum_spaces(spaces: Iterable[Subspace]) -> Subspace:
    spaces = list(spaces)
    out = spaces[0]
    for s in spaces[1:]:
        out = out.sum(s)
    return out


def intersection(U: Subspace, V: Subspace) -> Subspace:
    return U.intersection(V)
