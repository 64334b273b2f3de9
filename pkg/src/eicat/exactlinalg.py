"""Exact linear algebra over the rationals and prime fields.

Matrices are dense numpy arrays: ``int64`` residues in ``[0, p)`` for a prime
field, ``object`` arrays of ``flint.fmpq`` for the rationals.
Row reduction is delegated to python-flint (``nmod_mat`` / ``fmpq_mat``);
reduced row echelon form is unique, so every basis derived from it below is
deterministic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Iterable, Sequence

import flint
import numpy as np

__all__ = [
    "FieldSpec",
    "Matrix",
    "QuotientMap",
    "PreparedMatrix",
    "mat_rref",
    "mat_rank",
    "mat_kernel_basis",
    "mat_image_basis",
    "mat_solve",
    "subspace_sum",
    "subspace_intersection",
    "quotient_coordinates",
]

_FLOAT_EXACT = 2**53


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class FieldSpec:
    """The ground field: ``characteristic == 0`` is Q, otherwise F_p."""

    characteristic: int

    def __post_init__(self):
        c = self.characteristic
        if c != 0 and not _is_prime(c):
            raise ValueError(f"characteristic must be 0 or a prime, got {c}")

    @classmethod
    def rationals(cls) -> "FieldSpec":
        return cls(0)

    @classmethod
    def prime(cls, p: int) -> "FieldSpec":
        if not _is_prime(p):
            raise ValueError(f"{p} is not prime")
        return cls(p)

    @property
    def kind(self) -> str:
        return "Rationals" if self.characteristic == 0 else "PrimeField"

    @property
    def p(self) -> int:
        return self.characteristic

    @property
    def dtype(self):
        return object if self.characteristic == 0 else np.int64

    def __str__(self):
        return "Q" if self.characteristic == 0 else f"F_{self.characteristic}"

    # -- scalars ---------------------------------------------------------
    def scalar(self, x):
        if self.characteristic == 0:
            if isinstance(x, flint.fmpq):
                return x
            if isinstance(x, str):
                x = Fraction(x)
            if isinstance(x, Fraction):
                return flint.fmpq(x.numerator, x.denominator)
            return flint.fmpq(int(x))
        if isinstance(x, str):
            x = Fraction(x)
        if isinstance(x, (Fraction, flint.fmpq)):
            return (int(x.numerator) * pow(int(x.denominator), -1, self.p)) % self.p
        return int(x) % self.p

    def zero(self):
        return self.scalar(0)

    def one(self):
        return self.scalar(1)

    def inv(self, x):
        x = self.scalar(x)
        if x == 0:
            raise ZeroDivisionError("zero has no inverse")
        if self.characteristic == 0:
            return 1 / x
        return pow(x, -1, self.p)

    def divides_order(self, order: int) -> bool:
        """True when the characteristic divides ``order`` (never for Q)."""
        return self.characteristic != 0 and order % self.characteristic == 0

    # -- arrays ----------------------------------------------------------
    def array(self, data) -> np.ndarray:
        """Normalise nested data into a canonical array for this field."""
        if self.characteristic == 0:
            a = np.array(data, dtype=object)
            if a.size:
                flat = a.reshape(-1)
                for i, x in enumerate(flat):
                    if not isinstance(x, flint.fmpq):
                        flat[i] = self.scalar(x)
            return a
        a = np.array(data, dtype=object) if _has_fraction(data) else np.asarray(data)
        if a.dtype == object:
            return np.vectorize(self.scalar, otypes=[np.int64])(a) if a.size else a.astype(np.int64)
        return np.mod(a.astype(np.int64), self.p)

    def zeros(self, shape) -> np.ndarray:
        if self.characteristic == 0:
            a = np.empty(shape, dtype=object)
            a.fill(flint.fmpq(0))
            return a
        return np.zeros(shape, dtype=np.int64)

    def eye(self, n: int) -> np.ndarray:
        a = self.zeros((n, n))
        for i in range(n):
            a[i, i] = self.one()
        return a

    def reduce(self, a: np.ndarray) -> np.ndarray:
        if self.characteristic == 0:
            return a
        return np.mod(a, self.p)

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if self.characteristic == 0:
            vector = b.ndim == 1
            b2 = b.reshape(-1, 1) if vector else b
            m, k, n = a.shape[0], a.shape[1], b2.shape[1]
            if m == 0 or n == 0 or k == 0:
                out = self.zeros((m, n))
            elif m * k * n <= _SMALL_PRODUCT:
                out = a.dot(b2)
            else:
                out = _from_flint(self, _to_flint(self, a) * _to_flint(self, b2), m, n)
            return out[:, 0] if vector else out
        inner = a.shape[1] if a.ndim > 1 else a.shape[0]
        if (self.p - 1) ** 2 * max(inner, 1) < _FLOAT_EXACT:
            out = np.rint(a.astype(np.float64) @ b.astype(np.float64)).astype(np.int64)
            return np.mod(out, self.p)
        return np.mod(np.array(a, dtype=object).dot(np.array(b, dtype=object)), self.p).astype(np.int64)

    def neg(self, a: np.ndarray) -> np.ndarray:
        return -a if self.characteristic == 0 else np.mod(-a, self.p)

    def random_array(self, rng: np.random.Generator, shape, spread: int = 2) -> np.ndarray:
        if self.characteristic == 0:
            ints = rng.integers(-spread, spread + 1, size=shape)
            return self.array(ints.tolist())
        return rng.integers(0, self.p, size=shape, dtype=np.int64)

    def primitive(self, v: np.ndarray) -> np.ndarray:
        """Over Q, the positive multiple of ``v`` with coprime integer entries; unchanged over F_p."""
        if self.characteristic or not v.size:
            return v
        den = 1
        for x in v.reshape(-1):
            den = math.lcm(den, int(x.q))
        nums = [int(x.p) * (den // int(x.q)) for x in v.reshape(-1)]
        g = 0
        for a in nums:
            g = math.gcd(g, a)
        if g == 0:
            return v
        return self.array([a // g for a in nums]).reshape(v.shape)

    def is_zero(self, a: np.ndarray) -> bool:
        return not np.any(a != 0)


# below this many scalar products, object-array arithmetic beats converting to flint
_SMALL_PRODUCT = 4096


def _has_fraction(data) -> bool:
    if isinstance(data, np.ndarray):
        return data.dtype == object
    if isinstance(data, (Fraction, flint.fmpq, str)):
        return True
    if isinstance(data, (list, tuple)):
        return any(_has_fraction(x) for x in data)
    return False


# -- flint bridge --------------------------------------------------------

def _to_flint(F: FieldSpec, a: np.ndarray):
    m, n = a.shape
    if F.characteristic == 0:
        # the arrays met in practice are mostly zero; filling entrywise is cheaper
        M = flint.fmpq_mat(m, n)
        rows, cols = np.nonzero(a)
        for i, j, v in zip(rows.tolist(), cols.tolist(), a[rows, cols].tolist()):
            M[i, j] = v
        return M
    return flint.nmod_mat(m, n, a.reshape(-1).tolist(), F.p)


def _from_flint(F: FieldSpec, M, m: int, n: int) -> np.ndarray:
    if F.characteristic == 0:
        out = np.empty(m * n, dtype=object)
        out[:] = M.entries()
        return out.reshape(m, n)
    return np.fromiter(map(int, M.entries()), dtype=np.int64, count=m * n).reshape(m, n)


class PreparedMatrix:
    """A fixed left factor, converted once for repeated products ``a @ b``."""

    def __init__(self, F: FieldSpec, a: np.ndarray):
        self.field = F
        self.shape = a.shape
        self._a = a
        self._flint = None
        if F.characteristic == 0 and a.size:
            self._flint = _to_flint(F, a)

    def matmul(self, b: np.ndarray) -> np.ndarray:
        F = self.field
        if self._flint is None:
            return F.matmul(self._a, b)
        vector = b.ndim == 1
        b2 = b.reshape(-1, 1) if vector else b
        if b2.shape[1] == 0:
            out = F.zeros((self.shape[0], 0))
        else:
            out = _from_flint(F, self._flint * _to_flint(F, b2), self.shape[0], b2.shape[1])
        return out[:, 0] if vector else out


def rref_array(F: FieldSpec, a: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns of a raw array."""
    m, n = a.shape
    if m == 0 or n == 0:
        return F.zeros((m, n)), []
    R, rank = _to_flint(F, a).rref()
    R = _from_flint(F, R, m, n)
    rank = int(rank)
    pivots = np.argmax(R[:rank] != 0, axis=1).tolist() if rank else []
    return R, pivots


def rank_array(F: FieldSpec, a: np.ndarray) -> int:
    if a.shape[0] == 0 or a.shape[1] == 0:
        return 0
    return int(_to_flint(F, a).rank())


def kernel_array(F: FieldSpec, a: np.ndarray) -> np.ndarray:
    """Columns spanning the right kernel, one per free column of the rref."""
    m, n = a.shape
    R, pivots = rref_array(F, a)
    pset = set(pivots)
    free = [c for c in range(n) if c not in pset]
    K = F.zeros((n, len(free)))
    for j, c in enumerate(free):
        K[c, j] = F.one()
    if pivots and free:
        K[pivots, :] = F.neg(R[: len(pivots)][:, free])
    return K


def image_array(F: FieldSpec, a: np.ndarray) -> np.ndarray:
    """The pivot columns of ``a``: an independent spanning set of its image."""
    _, pivots = rref_array(F, a)
    return a[:, pivots]


def independent_columns(F: FieldSpec, a: np.ndarray) -> np.ndarray:
    if a.shape[1] == 0:
        return a
    return image_array(F, a)


def solve_array(F: FieldSpec, a: np.ndarray, b: np.ndarray) -> np.ndarray | None:
    """Solve ``a @ x = b`` for a vector or matrix ``b``; None if inconsistent."""
    vector = b.ndim == 1
    B = b.reshape(-1, 1) if vector else b
    if a.shape[0] != B.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    m, n = a.shape
    k = B.shape[1]
    if m == 0:
        x = F.zeros((n, k))
        return x[:, 0] if vector else x
    R, pivots = rref_array(F, np.concatenate([a, B], axis=1))
    if any(p >= n for p in pivots):
        return None
    x = F.zeros((n, k))
    for i, p in enumerate(pivots):
        x[p] = R[i, n:]
    return x[:, 0] if vector else x


def left_inverse(F: FieldSpec, basis: np.ndarray) -> np.ndarray:
    """A matrix ``L`` with ``L @ basis == I`` for a full-column-rank basis."""
    r = basis.shape[1]
    if r == 0:
        return F.zeros((0, basis.shape[0]))
    L = solve_array(F, basis.T, F.eye(r))
    if L is None:
        raise ValueError("basis columns are not independent")
    return L.T


# -- public Matrix wrapper ----------------------------------------------

@dataclass(frozen=True, eq=False)
class Matrix:
    """An immutable dense matrix over a :class:`FieldSpec`."""

    field: FieldSpec
    a: np.ndarray = dc_field(repr=False)

    def __post_init__(self):
        if self.a.ndim != 2:
            raise ValueError("Matrix needs a 2-d array")
        self.a.setflags(write=False)

    @classmethod
    def from_rows(cls, field: FieldSpec, rows: Sequence[Sequence], cols: int | None = None) -> "Matrix":
        rows = [list(r) for r in rows]
        if not rows:
            return cls(field, field.zeros((0, cols or 0)))
        return cls(field, field.array(rows))

    @classmethod
    def identity(cls, field: FieldSpec, n: int) -> "Matrix":
        return cls(field, field.eye(n))

    @classmethod
    def zeros(cls, field: FieldSpec, rows: int, cols: int) -> "Matrix":
        return cls(field, field.zeros((rows, cols)))

    @classmethod
    def from_columns(cls, field: FieldSpec, cols: Sequence[Sequence], nrows: int) -> "Matrix":
        if not cols:
            return cls(field, field.zeros((nrows, 0)))
        return cls(field, field.array([list(c) for c in cols]).T.copy())

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    @property
    def entries(self) -> list:
        return [self.field.scalar(x) for x in self.a.reshape(-1)]

    def tolist(self) -> list[list]:
        return [[self.field.scalar(x) for x in row] for row in self.a]

    def columns(self) -> list[tuple]:
        return [tuple(self.field.scalar(x) for x in self.a[:, j]) for j in range(self.cols)]

    def __getitem__(self, idx):
        return self.field.scalar(self.a[idx])

    def _check(self, other: "Matrix"):
        if other.field != self.field:
            raise ValueError("matrices over different fields")

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        return Matrix(self.field, self.field.matmul(self.a, other.a))

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        return Matrix(self.field, self.field.reduce(self.a + other.a))

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        return Matrix(self.field, self.field.reduce(self.a - other.a))

    def __neg__(self) -> "Matrix":
        return Matrix(self.field, self.field.neg(self.a))

    def scale(self, c) -> "Matrix":
        c = self.field.scalar(c)
        return Matrix(self.field, self.field.reduce(self.a * c))

    def apply(self, v: Sequence) -> tuple:
        vec = self.field.array(list(v))
        return tuple(self.field.scalar(x) for x in self.field.matmul(self.a, vec.reshape(-1, 1))[:, 0])

    @property
    def T(self) -> "Matrix":
        return Matrix(self.field, self.a.T.copy())

    def is_zero(self) -> bool:
        return self.field.is_zero(self.a)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.field == other.field and self.a.shape == other.a.shape and not np.any(self.a != other.a)

    def __hash__(self):
        return hash((self.field, self.a.shape, tuple(self.entries)))

    def __repr__(self):
        return f"Matrix({self.field}, {self.tolist()})"


def _cols_to_vectors(F: FieldSpec, a: np.ndarray) -> list[tuple]:
    return [tuple(F.scalar(x) for x in a[:, j]) for j in range(a.shape[1])]


def _vectors_to_cols(F: FieldSpec, vecs: Iterable[Sequence], dim: int) -> np.ndarray:
    vecs = [list(v) for v in vecs]
    for v in vecs:
        if len(v) != dim:
            raise ValueError(f"vector of length {len(v)} in ambient dimension {dim}")
    if not vecs:
        return F.zeros((dim, 0))
    return F.array(vecs).T.copy()


def mat_rref(m: Matrix) -> tuple[Matrix, list[int]]:
    R, piv = rref_array(m.field, m.a)
    return Matrix(m.field, R), piv


def mat_rank(m: Matrix) -> int:
    return rank_array(m.field, m.a)


def mat_kernel_basis(m: Matrix) -> list[tuple]:
    return _cols_to_vectors(m.field, kernel_array(m.field, m.a))


def mat_image_basis(m: Matrix) -> list[tuple]:
    return _cols_to_vectors(m.field, image_array(m.field, m.a))


def mat_solve(m: Matrix, b: Sequence) -> tuple | None:
    if len(b) != m.rows:
        raise ValueError(f"right-hand side has length {len(b)}, expected {m.rows}")
    x = solve_array(m.field, m.a, m.field.array(list(b)).reshape(-1) if len(b) else m.field.zeros(0))
    if x is None:
        return None
    return tuple(m.field.scalar(v) for v in x)


# -- subspaces ------------------------------------------------------------

def sum_array(F: FieldSpec, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape[0] != b.shape[0]:
        raise ValueError("subspaces live in different ambient dimensions")
    return independent_columns(F, np.concatenate([a, b], axis=1))


def intersection_array(F: FieldSpec, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.shape[0] != b.shape[0]:
        raise ValueError("subspaces live in different ambient dimensions")
    a = independent_columns(F, a)
    b = independent_columns(F, b)
    if a.shape[1] == 0 or b.shape[1] == 0:
        return F.zeros((a.shape[0], 0))
    K = kernel_array(F, np.concatenate([a, F.neg(b)], axis=1))
    return independent_columns(F, F.matmul(a, K[: a.shape[1]]))


class QuotientMap:
    """Coordinates on ``k^n / U`` through a complement of coordinate vectors.

    With ``R`` the rref of ``U^T`` and pivot positions ``P``, a vector ``v``
    is reduced to ``v - R^T v[P]``, which vanishes on ``P``; the surviving
    entries are its quotient coordinates.  ``lift`` embeds coordinates back
    into those free positions, so ``project @ lift == I``.
    """

    def __init__(self, F: FieldSpec, ambient: int, sub: np.ndarray):
        if sub.shape[0] != ambient:
            raise ValueError("subspace basis has the wrong ambient dimension")
        self.field = F
        self.ambient = ambient
        if sub.shape[1]:
            R, piv = rref_array(F, sub.T.copy())
            R = R[: len(piv)]
        else:
            R, piv = F.zeros((0, ambient)), []
        self.pivots = piv
        self.basis = R.T.copy()  # an independent spanning set of U
        pset = set(piv)
        self.free = [i for i in range(ambient) if i not in pset]
        proj = F.zeros((len(self.free), ambient))
        for r, i in enumerate(self.free):
            proj[r, i] = F.one()
        if piv and self.free:
            proj[:, piv] = F.neg(R[:, self.free].T)
        self.project = proj
        lift = F.zeros((ambient, len(self.free)))
        for r, i in enumerate(self.free):
            lift[i, r] = F.one()
        self.lift = lift

    @property
    def dim(self) -> int:
        return len(self.free)

    def __call__(self, v: np.ndarray) -> np.ndarray:
        return self.field.matmul(self.project, v)


def subspace_sum(field: FieldSpec, u: Sequence[Sequence], w: Sequence[Sequence], dim: int) -> list[tuple]:
    return _cols_to_vectors(field, sum_array(field, _vectors_to_cols(field, u, dim), _vectors_to_cols(field, w, dim)))


def subspace_intersection(field: FieldSpec, u: Sequence[Sequence], w: Sequence[Sequence], dim: int) -> list[tuple]:
    return _cols_to_vectors(
        field, intersection_array(field, _vectors_to_cols(field, u, dim), _vectors_to_cols(field, w, dim))
    )


def quotient_coordinates(field: FieldSpec, sub: Sequence[Sequence], dim: int) -> Matrix:
    """The matrix sending ambient vectors to coordinates in ``k^dim / span(sub)``."""
    return Matrix(field, QuotientMap(field, dim, _vectors_to_cols(field, sub, dim)).project)
