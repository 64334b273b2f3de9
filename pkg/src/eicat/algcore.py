"""Finite-dimensional algebras by structure constants and their radicals.

Group algebras and category algebras are *monomial*: the product of two
basis elements is a basis element or zero, recorded in ``table`` (``-1`` for
zero).  Quotients such as ``A/J`` are carried by dense structure constants.

Radicals.  In characteristic 0 the radical is the kernel of the trace form
``(a, b) -> Tr(L_ab)``.  In characteristic ``p`` we run the chain
``I_{-1} = A``, ``I_i = {x in I_{i-1} : g_i(xA) = 0}`` for
``i = 0..floor(log_p dim A)``, where ``g_i(x)`` is ``Tr(L~^{p^i}) / p^i mod p``
for an integer lift ``L~`` of the left multiplication matrix of ``x``; the last
term is the radical.  ``g_i`` is linear on ``I_{i-1}``, so it is evaluated on a
basis and extended.  The category algebra radical is assembled from the
automorphism group radicals (EI categories) and always re-checked.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .catbuild import FiniteCategory, aut_group
from .exactlinalg import (
    FieldSpec,
    QuotientMap,
    independent_columns,
    kernel_array,
    left_inverse,
    rank_array,
)
from .groups import FiniteGroup


class FiniteDimAlgebra:
    """An associative unital algebra with basis ``b_0..b_{dim-1}``.

    ``structure[i, j, k]`` is the coefficient of ``b_k`` in ``b_i b_j``.
    """

    def __init__(self, field: FieldSpec, labels: list, structure: np.ndarray):
        self.field = field
        self.labels = list(labels)
        d = len(self.labels)
        if structure.shape != (d, d, d):
            raise ValueError(f"structure constants must have shape {(d, d, d)}")
        self.structure = structure

    @property
    def dim(self) -> int:
        return len(self.labels)

    def mul(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        F = self.field
        uv = F.reduce(np.multiply.outer(u, v)).reshape(-1)
        return F.matmul(uv.reshape(1, -1), self.structure.reshape(self.dim * self.dim, self.dim))[0]

    def left_matrix(self, u: np.ndarray) -> np.ndarray:
        """Matrix of ``x -> u x``: column ``j`` is ``u b_j``."""
        F = self.field
        return F.matmul(u.reshape(1, -1), self.structure.reshape(self.dim, -1))[0].reshape(self.dim, self.dim).T.copy()

    def basis_vector(self, i: int) -> np.ndarray:
        v = self.field.zeros(self.dim)
        v[i] = self.field.one()
        return v

    @cached_property
    def unit(self) -> np.ndarray:
        """The two-sided identity, found by solving ``1 * b_j = b_j``."""
        F = self.field
        d = self.dim
        # sum_i x_i S[i, j, k] = delta_jk for all j, k
        A = self.structure.reshape(d, d * d).T
        rhs = F.eye(d).reshape(-1)
        from .exactlinalg import solve_array

        x = solve_array(F, A, rhs)
        if x is None:
            raise ValueError("algebra has no left identity")
        return x

    def trace_vector(self) -> np.ndarray:
        """``t[k] = Tr(L_{b_k})``."""
        return self.field.reduce(np.einsum("kjj->k", self.structure))

    def psi_table(self, psi: np.ndarray) -> np.ndarray:
        """``P[i, j] = psi(b_i b_j)`` for a functional ``psi``."""
        return self.field.matmul(self.structure.reshape(self.dim * self.dim, self.dim), psi.reshape(-1, 1)).reshape(
            self.dim, self.dim
        )

    def power_trace(self, u: np.ndarray, exponent: int, modulus: int) -> int:
        """``Tr(L~^exponent) mod modulus`` for the integer lift of ``L_u``."""
        L = np.rint(np.tensordot(u.astype(np.float64), self.structure.astype(np.float64), axes=(0, 0))).astype(
            np.int64
        ).T % modulus
        return int(np.trace(_int_matpow(L, exponent, modulus))) % modulus

    def is_associative(self) -> bool:
        S = self.structure
        F = self.field
        d = self.dim
        # (b_i b_j) b_k versus b_i (b_j b_k)
        left = F.matmul(S.reshape(d * d, d), S.reshape(d, d * d)).reshape(d, d, d, d)
        # sum_m S[j, k, m] S[i, m, l], indexed [j, k, i, l]
        right = F.matmul(S.reshape(d * d, d), S.transpose(1, 0, 2).reshape(d, d * d))
        right = right.reshape(d, d, d, d).transpose(2, 0, 1, 3)
        return not np.any(left != right)

    def to_json(self) -> dict:
        nz = np.argwhere(self.structure != 0)
        return {
            "field": str(self.field),
            "basis": [str(x) for x in self.labels],
            "structure": [[int(i), int(j), int(k), str(self.field.scalar(self.structure[i, j, k]))] for i, j, k in nz],
        }


def _int_matpow(L: np.ndarray, e: int, m: int) -> np.ndarray:
    exact = (m - 1) ** 2 * L.shape[0] < 2**53

    def mm(a, b):
        if exact:
            return np.rint(a.astype(np.float64) @ b.astype(np.float64)).astype(np.int64) % m
        return (np.array(a, dtype=object).dot(np.array(b, dtype=object)) % m).astype(np.int64)

    result = np.eye(L.shape[0], dtype=np.int64)
    base = L % m
    while e:
        if e & 1:
            result = mm(result, base)
        e >>= 1
        if e:
            base = mm(base, base)
    return result


class MonomialAlgebra(FiniteDimAlgebra):
    """Algebra whose basis products are basis elements or zero."""

    def __init__(self, field: FieldSpec, labels: list, table: np.ndarray):
        self.field = field
        self.labels = list(labels)
        self.table = np.asarray(table, dtype=np.int64)

    @cached_property
    def structure(self) -> np.ndarray:
        d = self.dim
        S = self.field.zeros((d, d, d))
        i, j = np.nonzero(self.table >= 0)
        S[i, j, self.table[i, j]] = self.field.one()
        return S

    def mul(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        F = self.field
        out = F.zeros(self.dim)
        iu, iv = np.flatnonzero(u != 0), np.flatnonzero(v != 0)
        if iu.size == 0 or iv.size == 0:
            return out
        sub = self.table[np.ix_(iu, iv)]
        w = F.reduce(np.multiply.outer(u[iu], v[iv]))
        mask = sub >= 0
        np.add.at(out, sub[mask], w[mask])
        return F.reduce(out)

    def left_matrix(self, u: np.ndarray) -> np.ndarray:
        F = self.field
        d = self.dim
        L = F.zeros((d, d))
        for i in np.flatnonzero(u != 0):
            row = self.table[i]
            js = np.flatnonzero(row >= 0)
            np.add.at(L, (row[js], js), u[i])
        return F.reduce(L)

    def trace_vector(self) -> np.ndarray:
        t = (self.table == np.arange(self.dim)[None, :]).sum(axis=1)
        return self.field.array(t.tolist())

    def psi_table(self, psi: np.ndarray) -> np.ndarray:
        P = self.field.zeros((self.dim, self.dim))
        mask = self.table >= 0
        P[mask] = psi[self.table[mask]]
        return P

    def power_trace(self, u: np.ndarray, exponent: int, modulus: int) -> int:
        d = self.dim
        L = np.zeros((d, d), dtype=np.int64)
        for i in np.flatnonzero(u != 0):
            row = self.table[i]
            js = np.flatnonzero(row >= 0)
            np.add.at(L, (row[js], js), int(u[i]))
        return int(np.trace(_int_matpow(L % modulus, exponent, modulus))) % modulus


class GroupAlgebra(MonomialAlgebra):
    """``kG`` with basis the group elements in table order."""

    def __init__(self, group: FiniteGroup, field: FieldSpec):
        self.group = group
        super().__init__(field, list(group.labels), np.array(group.table, dtype=np.int64))

    @cached_property
    def _divide(self) -> np.ndarray:
        # D[c, b] = c * b^-1, so (u v)[c] = sum_b u[c b^-1] v[b]
        G = self.group
        return np.array([[G.table[c][G.inverses[b]] for b in range(G.order)] for c in range(G.order)], dtype=np.int64)

    @cached_property
    def unit(self) -> np.ndarray:
        return self.basis_vector(self.group.identity)

    def trace_vector(self) -> np.ndarray:
        t = self.field.zeros(self.dim)
        t[self.group.identity] = self.field.scalar(self.group.order)
        return t

    def power_trace(self, u: np.ndarray, exponent: int, modulus: int) -> int:
        # Tr(L_w) = |G| * (coefficient of 1 in w) in the regular representation
        D = self._divide
        exact = (modulus - 1) ** 2 * self.dim < 2**53

        def mul(a, b):
            L = a[D]
            if exact:
                return np.rint(L.astype(np.float64) @ b.astype(np.float64)).astype(np.int64) % modulus
            return (np.array(L, dtype=object).dot(np.array(b, dtype=object)) % modulus).astype(np.int64)

        base = np.asarray(u, dtype=np.int64) % modulus
        result = np.zeros(self.dim, dtype=np.int64)
        result[self.group.identity] = 1
        e = exponent
        while e:
            if e & 1:
                result = mul(result, base)
            e >>= 1
            if e:
                base = mul(base, base)
        return (self.group.order * int(result[self.group.identity])) % modulus


def group_algebra(G: FiniteGroup, field: FieldSpec) -> GroupAlgebra:
    return GroupAlgebra(G, field)


# -- radicals -------------------------------------------------------------

def _lift_int(F: FieldSpec, v: np.ndarray) -> np.ndarray:
    return np.asarray(v, dtype=np.int64) % F.p


def radical_basis(A: FiniteDimAlgebra) -> np.ndarray:
    """Columns spanning the Jacobson radical of ``A``."""
    F = A.field
    d = A.dim
    if d == 0:
        return F.zeros((0, 0))
    t = A.trace_vector()
    if F.characteristic == 0:
        M = A.psi_table(t)  # M[i, j] = Tr(L_{b_i b_j})
        return kernel_array(F, M.T.copy())
    p = F.p
    top = int(math.floor(math.log(d, p) + 1e-9)) if d > 1 else 0
    X = F.eye(d)
    for i in range(top + 1):
        r = X.shape[1]
        if r == 0:
            break
        modulus = p ** (i + 1)
        phi = F.zeros(r)
        for k in range(r):
            val = A.power_trace(_lift_int(F, X[:, k]), p**i, modulus)
            if val % p**i:
                raise ArithmeticError("trace of p-power not divisible as expected")
            phi[k] = (val // p**i) % p
        # psi agrees with phi on span(X); Phi[k, j] = psi(x_k b_j)
        psi = F.matmul(phi.reshape(1, -1), left_inverse(F, X))[0]
        Phi = F.matmul(X.T.copy(), A.psi_table(psi))
        X = F.matmul(X, kernel_array(F, Phi.T.copy()))
    return X


def radical_group_algebra(A: GroupAlgebra) -> np.ndarray:
    """Radical of ``kG``; zero without computation when ``char k`` is prime to ``|G|``."""
    if not A.field.divides_order(A.group.order):
        # the trace form |G| * [gh = 1] is nondegenerate
        return A.field.zeros((A.dim, 0))
    return radical_basis(A)


def quotient_algebra(A: FiniteDimAlgebra, ideal: np.ndarray) -> tuple[FiniteDimAlgebra, QuotientMap]:
    """``A / I`` on the complement basis chosen by :class:`QuotientMap`."""
    F = A.field
    Q = QuotientMap(F, A.dim, ideal)
    m = Q.dim
    S = F.zeros((m, m, m))
    lifts = Q.lift
    for i in range(m):
        Li = A.left_matrix(lifts[:, i])
        prod = F.matmul(Li, lifts)  # columns: lift_i * lift_j
        S[i] = Q(prod).T
    labels = [A.labels[j] for j in Q.free]
    return FiniteDimAlgebra(F, labels, S), Q


def ideal_product(A: FiniteDimAlgebra, U: np.ndarray, W: np.ndarray) -> np.ndarray:
    """Basis of ``span{u w}``."""
    F = A.field
    if U.shape[1] == 0 or W.shape[1] == 0:
        return F.zeros((A.dim, 0))
    cols = [F.matmul(A.left_matrix(U[:, i]), W) for i in range(U.shape[1])]
    return independent_columns(F, np.concatenate(cols, axis=1))


def nilpotency_index(A: FiniteDimAlgebra, J: np.ndarray, limit: int | None = None) -> int | None:
    """Least ``m`` with ``J^m = 0``, or None if not reached within ``limit``."""
    if J.shape[1] == 0:
        return 0
    limit = limit if limit is not None else A.dim + 1
    power = J
    for m in range(2, limit + 1):
        power = ideal_product(A, power, J)
        if power.shape[1] == 0:
            return m
    return None


def is_two_sided_ideal(A: FiniteDimAlgebra, J: np.ndarray) -> bool:
    F = A.field
    r = rank_array(F, J)
    if r == 0:
        return True
    for i in range(A.dim):
        b = A.basis_vector(i)
        left = F.matmul(A.left_matrix(b), J)
        right = np.stack([A.mul(J[:, k], b) for k in range(J.shape[1])], axis=1)
        if rank_array(F, np.concatenate([J, left, right], axis=1)) != r:
            return False
    return True


def maschke_predicts_semisimple(G: FiniteGroup, field: FieldSpec) -> bool:
    return not field.divides_order(G.order)


# -- category algebras ----------------------------------------------------

class CategoryAlgebra(MonomialAlgebra):
    """``kC_n``: basis the morphisms of ``C`` in global order, ``f * g = f o g``."""

    def __init__(self, C: FiniteCategory, field: FieldSpec):
        self.category = C
        d = C.size
        table = np.full((d, d), -1, dtype=np.int64)
        for (a, b), hab in C.hom.items():
            if not hab:
                continue
            for c in range(b, C.n + 1):
                hbc = C.hom[(b, c)]
                T = C.table(a, b, c)
                hac = np.array(C.hom[(a, c)], dtype=np.int64)
                table[np.ix_(hbc, hab)] = hac[T]
        super().__init__(field, [f"{m.source}->{m.target}:{m.payload}" for m in C.morphisms], table)

    @property
    def idempotents(self) -> list[int]:
        return list(self.category.identity)

    def idempotent(self, x: int) -> np.ndarray:
        return self.basis_vector(self.category.identity[x])

    @cached_property
    def unit(self) -> np.ndarray:
        u = self.field.zeros(self.dim)
        for i in self.category.identity:
            u[i] = self.field.one()
        return u

    def degree(self, i: int) -> int:
        return int(self.category.target[i] - self.category.source[i])

    def structure_json(self) -> dict:
        C = self.category
        i, j = np.nonzero(self.table >= 0)
        return {
            "field": str(self.field),
            "species": C.species.kind,
            "params": C.species.params(),
            "n": C.n,
            "dim": self.dim,
            "basis": self.labels,
            "products": [[int(a), int(b), int(self.table[a, b])] for a, b in zip(i, j)],
        }

    def dumps(self) -> str:
        return json.dumps(self.structure_json(), sort_keys=True)


def category_algebra(C: FiniteCategory, field: FieldSpec) -> CategoryAlgebra:
    return CategoryAlgebra(C, field)


@dataclass
class CategoryRadical:
    """``J(kC_n)``: all non-endomorphisms plus the radicals of the ``kAut(x)``."""

    algebra: CategoryAlgebra
    non_endos: list[int]
    group_radicals: dict[int, np.ndarray]  # object -> columns over hom(x, x)

    @property
    def dim(self) -> int:
        return len(self.non_endos) + sum(J.shape[1] for J in self.group_radicals.values())

    def basis(self) -> np.ndarray:
        A = self.algebra
        F = A.field
        C = A.category
        cols = F.zeros((A.dim, self.dim))
        for k, i in enumerate(self.non_endos):
            cols[i, k] = F.one()
        k = len(self.non_endos)
        for x, J in self.group_radicals.items():
            ids = C.hom[(x, x)]
            for c in range(J.shape[1]):
                cols[ids, k] = J[:, c]
                k += 1
        return cols


_GROUP_RADICALS: dict[tuple, np.ndarray] = {}


def object_group_radical(C: FiniteCategory, field: FieldSpec, x: int) -> np.ndarray:
    key = (C.species, x, field)
    if key not in _GROUP_RADICALS:
        _GROUP_RADICALS[key] = radical_group_algebra(GroupAlgebra(aut_group(C, x), field))
    return _GROUP_RADICALS[key]


def radical_category_algebra(A: CategoryAlgebra) -> CategoryRadical:
    C = A.category
    non_endos = [i for i in range(C.size) if C.source[i] != C.target[i]]
    groups = {x: object_group_radical(C, A.field, x) for x in C.objects}
    return CategoryRadical(A, non_endos, groups)


@dataclass
class InvertibilityReport:
    holds: bool
    per_object: list[dict]

    def to_json(self) -> dict:
        return {"holds": self.holds, "objects": self.per_object}


def invertibility_criterion(C: FiniteCategory, field: FieldSpec) -> InvertibilityReport:
    """Does ``char k`` avoid every ``|Aut(x)|``?  Orders are counted from the hom-sets."""
    rows = []
    for x in C.objects:
        order = len(C.hom[(x, x)])
        rows.append({"object": x, "aut_order": order, "char_divides": field.divides_order(order)})
    return InvertibilityReport(not any(r["char_divides"] for r in rows), rows)
