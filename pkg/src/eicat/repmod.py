"""Representations of truncated categories and the functors between them.

A :class:`CModule` stores one matrix per morphism (``dims[b] x dims[a]`` for
``a -> b``), as raw field arrays in the global morphism order of its category.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algcore import object_group_radical
from .catbuild import FiniteCategory, aut_group, build_category, self_embedding
from .exactlinalg import (
    FieldSpec,
    Matrix,
    QuotientMap,
    independent_columns,
    kernel_array,
    left_inverse,
    rank_array,
)
from .groups import FiniteGroup, linear_characters


class ModuleError(ValueError):
    pass


class CModule:
    def __init__(self, category: FiniteCategory, field: FieldSpec, dims: Sequence[int], action: list[np.ndarray]):
        if len(dims) != category.n + 1:
            raise ModuleError(f"need {category.n + 1} dimensions, got {len(dims)}")
        if len(action) != category.size:
            raise ModuleError(f"need {category.size} action matrices, got {len(action)}")
        for i, m in enumerate(category.morphisms):
            if action[i].shape != (dims[m.target], dims[m.source]):
                raise ModuleError(f"action of morphism {i} has shape {action[i].shape}")
        self.category = category
        self.field = field
        self.dims = tuple(int(d) for d in dims)
        self.action = action

    def __repr__(self):
        return f"CModule({self.category.species.label}_{self.category.n}, {self.field}, dims={self.dims})"

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    def is_zero(self) -> bool:
        return self.total_dim == 0

    def matrix(self, alpha: int) -> Matrix:
        return Matrix(self.field, self.action[alpha])

    def support(self) -> list[int]:
        return [x for x, d in enumerate(self.dims) if d]

    def max_support(self) -> int:
        s = self.support()
        return max(s) if s else -1

    def apply(self, alpha: int, v: np.ndarray) -> np.ndarray:
        return self.field.matmul(self.action[alpha], v)

    def functoriality_defects(self, limit: int | None = None, rng: np.random.Generator | None = None) -> list:
        """Composable pairs (and identities) where the action is not functorial.

        Exhaustive when the number of composable pairs is at most ``limit``;
        otherwise a random sample of ``limit`` pairs.
        """
        C, F = self.category, self.field
        bad = []
        for x in C.objects:
            if np.any(self.action[C.identity[x]] != F.eye(self.dims[x])):
                bad.append(("identity", x))
        pairs = list(C.composable_pairs())
        if limit is not None and len(pairs) > limit:
            rng = rng or np.random.default_rng(0)
            pairs = [pairs[i] for i in rng.choice(len(pairs), size=limit, replace=False)]
        for g, f in pairs:
            lhs = self.action[C.compose(g, f)]
            rhs = F.matmul(self.action[g], self.action[f])
            if np.any(lhs != rhs):
                bad.append((g, f))
        return bad

    def is_functorial(self, limit: int | None = None) -> bool:
        return not self.functoriality_defects(limit)

    def to_json(self) -> dict:
        C = self.category
        return {
            "category": {"species": C.species.kind, "params": C.species.params(), "n": C.n},
            "field": str(self.field),
            "dims": list(self.dims),
            "action": {
                f"{m.source}->{m.target}:{list(_plain(m.payload))}": [
                    [str(self.field.scalar(x)) for x in row] for row in self.action[i]
                ]
                for i, m in enumerate(C.morphisms)
                if self.dims[m.source] and self.dims[m.target]
            },
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def _plain(p):
    return [_plain(x) for x in p] if isinstance(p, tuple) else p


def module_from_json(data: dict, category: FiniteCategory, field: FieldSpec) -> CModule:
    dims = data["dims"]
    action = []
    for m in category.morphisms:
        key = f"{m.source}->{m.target}:{list(_plain(m.payload))}"
        rows = data["action"].get(key)
        if rows is None:
            action.append(field.zeros((dims[m.target], dims[m.source])))
        else:
            action.append(field.array([[_parse_scalar(field, x) for x in row] for row in rows]).reshape(
                dims[m.target], dims[m.source]))
    return CModule(category, field, dims, action)


def _parse_scalar(field: FieldSpec, s):
    return field.scalar(s)


@dataclass
class ModuleHom:
    source: CModule
    target: CModule
    maps: list[np.ndarray]  # per object, target.dims[x] x source.dims[x]

    def is_natural(self) -> bool:
        F = self.source.field
        C = self.source.category
        for i, m in enumerate(C.morphisms):
            lhs = F.matmul(self.maps[m.target], self.source.action[i])
            rhs = F.matmul(self.target.action[i], self.maps[m.source])
            if np.any(lhs != rhs):
                return False
        return True

    def compose(self, first: "ModuleHom") -> "ModuleHom":
        """``self o first``."""
        F = self.source.field
        return ModuleHom(first.source, self.target, [F.matmul(a, b) for a, b in zip(self.maps, first.maps)])

    def rank_vector(self) -> tuple[int, ...]:
        return tuple(rank_array(self.source.field, m) for m in self.maps)

    def is_surjective(self) -> bool:
        return self.rank_vector() == self.target.dims

    def is_injective(self) -> bool:
        return self.rank_vector() == self.source.dims


@dataclass
class GroupModule:
    """A representation of ``Aut(x)``: one matrix per group element in table order."""

    group: FiniteGroup
    field: FieldSpec
    dim: int
    action: list[np.ndarray]

    def validate(self):
        G, F = self.group, self.field
        if len(self.action) != G.order:
            raise ModuleError("need one matrix per group element")
        if np.any(self.action[G.identity] != F.eye(self.dim)):
            raise ModuleError("identity does not act trivially")
        for a in range(G.order):
            for b in range(G.order):
                if np.any(self.action[G.table[a][b]] != F.matmul(self.action[a], self.action[b])):
                    raise ModuleError(f"not a representation at {(a, b)}")
        return self


def trivial_group_module(G: FiniteGroup, field: FieldSpec) -> GroupModule:
    return GroupModule(G, field, 1, [field.eye(1) for _ in range(G.order)])


def character_module(G: FiniteGroup, field: FieldSpec, chi: Sequence) -> GroupModule:
    return GroupModule(G, field, 1, [field.array([[chi[g]]]) for g in range(G.order)])


def regular_group_module(G: FiniteGroup, field: FieldSpec) -> GroupModule:
    mats = []
    for g in range(G.order):
        M = field.zeros((G.order, G.order))
        for h in range(G.order):
            M[G.table[g][h], h] = field.one()
        mats.append(M)
    return GroupModule(G, field, G.order, mats)


def builtin_simples(C: FiniteCategory, field: FieldSpec, x: int) -> list[tuple[str, GroupModule]]:
    """The 1-dimensional simples of ``Aut(x)`` over ``field``, trivial first."""
    G = aut_group(C, x)
    out = []
    for i, chi in enumerate(linear_characters(G, field)):
        out.append(("trivial" if i == 0 else f"chi{i}", character_module(G, field, chi)))
    return out


# -- constructions --------------------------------------------------------

def zero_module(C: FiniteCategory, field: FieldSpec) -> CModule:
    return CModule(C, field, [0] * (C.n + 1), [field.zeros((0, 0)) for _ in range(C.size)])


def representable_projective(C: FiniteCategory, field: FieldSpec, x: int) -> CModule:
    """``kC e_x = kC(x, -)`` with basis ``hom(x, y)`` at ``y``."""
    if not 0 <= x <= C.n:
        raise ModuleError(f"object {x} not in C_{C.n}")
    dims = [len(C.hom[(x, y)]) for y in C.objects]
    action = []
    for i, m in enumerate(C.morphisms):
        M = field.zeros((dims[m.target], dims[m.source]))
        if dims[m.source]:
            rows = C.postcompose(i, x)
            M[rows, np.arange(dims[m.source])] = field.one()
        action.append(M)
    return CModule(C, field, dims, action)


@dataclass
class OrbitData:
    """``hom(x, y)`` as ``reps o Aut(x)``: ``f = reps[orbit[f]] o group_elt[f]``."""

    reps: list[int]  # positions in hom(x, y)
    orbit: np.ndarray
    group_elt: np.ndarray


def orbit_data(C: FiniteCategory, x: int, y: int) -> OrbitData:
    T = C.table(x, x, y)  # T[f, g] = position of f o g
    size = len(C.hom[(x, y)])
    orbit = np.full(size, -1, dtype=np.int64)
    gelt = np.full(size, -1, dtype=np.int64)
    reps = []
    for f in range(size):
        if orbit[f] >= 0:
            continue
        k = len(reps)
        reps.append(f)
        images = T[f]
        if np.any(orbit[images] >= 0) or len(set(images.tolist())) != len(images):
            raise ModuleError(f"right action of Aut({x}) on hom({x},{y}) is not free")
        orbit[images] = k
        gelt[images] = np.arange(len(images))
    return OrbitData(reps, orbit, gelt)


def induced_projective(C: FiniteCategory, field: FieldSpec, x: int, W: GroupModule) -> CModule:
    """``kC e_x (x)_{kAut(x)} W``: one copy of ``W`` per orbit of ``hom(x, y) / Aut(x)``."""
    w = W.dim
    orbits = [orbit_data(C, x, y) for y in C.objects]
    dims = [len(o.reps) * w for o in orbits]
    action = []
    for i, m in enumerate(C.morphisms):
        a, b = m.source, m.target
        M = field.zeros((dims[b], dims[a]))
        if dims[a]:
            post = C.postcompose(i, x)
            ob = orbits[b]
            for k, r in enumerate(orbits[a].reps):
                f = post[r]  # alpha o rep = rep' o g
                k2, g = ob.orbit[f], ob.group_elt[f]
                M[k2 * w:(k2 + 1) * w, k * w:(k + 1) * w] = W.action[g]
        action.append(M)
    return CModule(C, field, dims, action)


def simple_module(C: FiniteCategory, field: FieldSpec, x: int, W: GroupModule | None = None) -> CModule:
    """``W`` placed at ``x``; every other morphism acts as zero."""
    G = aut_group(C, x)
    W = W or trivial_group_module(G, field)
    if W.group.order != G.order:
        raise ModuleError("group module is not over Aut(x)")
    W.validate()
    dims = [0] * (C.n + 1)
    dims[x] = W.dim
    action = []
    ids = C.hom[(x, x)]
    where = {idx: k for k, idx in enumerate(ids)}
    for i, m in enumerate(C.morphisms):
        if i in where:
            action.append(W.action[where[i]].copy())
        else:
            action.append(field.zeros((dims[m.target], dims[m.source])))
    return CModule(C, field, dims, action)


def direct_sum(*mods: CModule) -> CModule:
    if not mods:
        raise ModuleError("direct_sum needs at least one module")
    C, F = mods[0].category, mods[0].field
    dims = [sum(M.dims[x] for M in mods) for x in C.objects]
    action = []
    for i, m in enumerate(C.morphisms):
        A = F.zeros((dims[m.target], dims[m.source]))
        r = c = 0
        for M in mods:
            A[r:r + M.dims[m.target], c:c + M.dims[m.source]] = M.action[i]
            r += M.dims[m.target]
            c += M.dims[m.source]
        action.append(A)
    return CModule(C, F, dims, action)


_TOPS: dict = {}


def radical_quotient_module(C: FiniteCategory, field: FieldSpec) -> CModule:
    """``A/J`` as a left module: ``kAut(x)/J`` at ``x``, non-endomorphisms act as zero."""
    key = (C.species, C.n, field)
    if key in _TOPS:
        return _TOPS[key]
    F = field
    dims = []
    per_obj = {}
    for x in C.objects:
        J = object_group_radical(C, F, x)
        G = aut_group(C, x)
        Q = QuotientMap(F, G.order, J)
        free = np.array(Q.free, dtype=np.int64)
        table = np.array(G.table, dtype=np.int64)
        # g times the basis element h is g*h, so g acts on lifted coordinates by a column shuffle
        per_obj[x] = [Q.project[:, table[g][free]].copy() for g in range(G.order)]
        dims.append(Q.dim)
    action = []
    for i, m in enumerate(C.morphisms):
        if m.source == m.target:
            action.append(per_obj[m.source][int(C.position[i])])
        else:
            action.append(F.zeros((dims[m.target], dims[m.source])))
    _TOPS[key] = CModule(C, F, dims, action)
    return _TOPS[key]


# -- submodules, quotients, kernels ---------------------------------------

def _closure_basis(V: CModule, gens: dict[int, np.ndarray]) -> list[np.ndarray]:
    """Per-object bases of the submodule generated by ``gens[x]`` (columns in ``V_x``)."""
    C, F = V.category, V.field
    out = []
    for y in C.objects:
        cols = []
        for x, G in gens.items():
            if G.shape[1] == 0 or x > y:
                continue
            for f in C.hom[(x, y)]:
                cols.append(F.matmul(V.action[f], G))
        if cols:
            out.append(independent_columns(F, np.concatenate(cols, axis=1)))
        else:
            out.append(F.zeros((V.dims[y], 0)))
    return out


def _sandwich(V: CModule, lefts: list[np.ndarray], rights: list[np.ndarray], check: list[np.ndarray] | None = None):
    """``lefts[b] @ V_alpha @ rights[a]`` for every ``alpha: a -> b``.

    Morphisms sharing source and target are stacked so each pair of objects
    costs two products.  With ``check``, also verify ``check[b] @ result``
    reproduces ``V_alpha @ rights[a]`` (closure of a subspace).
    """
    C, F = V.category, V.field
    out: list = [None] * C.size
    for a in C.objects:
        R = rights[a]
        for b in range(a, C.n + 1):
            ids = C.hom[(a, b)]
            H, db, r, l = len(ids), V.dims[b], R.shape[1], lefts[b].shape[0]
            if H == 0:
                continue
            S = np.concatenate([V.action[i] for i in ids], axis=0) if db else F.zeros((0, V.dims[a]))
            X = F.matmul(S, R).reshape(H, db, r).transpose(1, 0, 2).reshape(db, H * r)
            Y = F.matmul(lefts[b], X)
            if check is not None and np.any(F.matmul(check[b], Y) != X):
                raise ModuleError("subspaces are not closed under the action")
            blocks = Y.reshape(l, H, r).transpose(1, 0, 2)
            for k, i in enumerate(ids):
                out[i] = blocks[k].copy()
    return out


def submodule(V: CModule, bases: list[np.ndarray]) -> tuple[CModule, ModuleHom]:
    """The submodule with the given per-object bases, plus its inclusion."""
    C, F = V.category, V.field
    lefts = [left_inverse(F, B) for B in bases]
    dims = [B.shape[1] for B in bases]
    U = CModule(C, F, dims, _sandwich(V, lefts, bases, check=bases))
    return U, ModuleHom(U, V, [B.copy() for B in bases])


def submodule_generated(V: CModule, gens: dict[int, Sequence] | dict[int, np.ndarray]) -> tuple[CModule, ModuleHom]:
    F = V.field
    arr = {}
    for x, g in gens.items():
        g = np.asarray(g) if isinstance(g, np.ndarray) else F.array([list(v) for v in g]).T
        arr[x] = g.reshape(V.dims[x], -1)
    return submodule(V, _closure_basis(V, arr))


def quotient(V: CModule, bases: list[np.ndarray]) -> tuple[CModule, ModuleHom]:
    """``V / U`` for a submodule given by per-object bases, plus the projection."""
    C, F = V.category, V.field
    Qs = [QuotientMap(F, V.dims[x], bases[x]) for x in C.objects]
    action = _sandwich(V, [Q.project for Q in Qs], [Q.lift for Q in Qs])
    W = CModule(C, F, [Q.dim for Q in Qs], action)
    return W, ModuleHom(V, W, [Q.project for Q in Qs])


def kernel(phi: ModuleHom) -> tuple[CModule, ModuleHom]:
    F = phi.source.field
    return submodule(phi.source, [kernel_array(F, M) for M in phi.maps])


def image(phi: ModuleHom) -> tuple[CModule, ModuleHom]:
    F = phi.source.field
    return submodule(phi.target, [independent_columns(F, M) for M in phi.maps])


def cokernel(phi: ModuleHom) -> tuple[CModule, ModuleHom]:
    F = phi.source.field
    return quotient(phi.target, [independent_columns(F, M) for M in phi.maps])


def identity_hom(V: CModule) -> ModuleHom:
    return ModuleHom(V, V, [V.field.eye(d) for d in V.dims])


# -- zeroth homology --------------------------------------------------------

@dataclass
class H0Data:
    """``H_0(V)`` with, per object, the quotient map ``V_x -> H_0(V)_x``."""

    module: CModule
    quotients: list[QuotientMap]
    lower_images: list[np.ndarray]


def h0_data(V: CModule) -> H0Data:
    C, F = V.category, V.field
    Qs, lows = [], []
    for x in C.objects:
        cols = [V.action[a] for y in range(x) for a in C.hom[(y, x)] if V.dims[y]]
        if cols:
            low = independent_columns(F, np.concatenate(cols, axis=1))
        else:
            low = F.zeros((V.dims[x], 0))
        lows.append(low)
        Qs.append(QuotientMap(F, V.dims[x], low))
    dims = [Q.dim for Q in Qs]
    action = []
    for i, m in enumerate(C.morphisms):
        if m.source == m.target:
            Q = Qs[m.source]
            action.append(F.matmul(Q.project, F.matmul(V.action[i], Q.lift)))
        else:
            action.append(F.zeros((dims[m.target], dims[m.source])))
    return H0Data(CModule(C, F, dims, action), Qs, lows)


def h0(V: CModule) -> CModule:
    return h0_data(V).module


def generating_degree(V: CModule) -> int:
    H = h0(V)
    sup = [x for x, d in enumerate(H.dims) if d]
    return max(sup) if sup else -1


# -- lift, restriction, shift ---------------------------------------------

def restrict(V: CModule, n: int) -> CModule:
    C = V.category
    if n > C.n:
        raise ModuleError(f"cannot restrict a C_{C.n}-module to C_{n}")
    if n < 0:
        raise ModuleError("truncation level must be >= 0")
    Cn = build_category(C.species, n)
    # morphisms of C_n are the first ones of C_N
    return CModule(Cn, V.field, V.dims[: n + 1], [a.copy() for a in V.action[: Cn.size]])


def restrict_hom(phi: ModuleHom, n: int) -> ModuleHom:
    return ModuleHom(restrict(phi.source, n), restrict(phi.target, n), [m.copy() for m in phi.maps[: n + 1]])


def lift(W: CModule, N: int) -> CModule:
    C, F = W.category, W.field
    if N < C.n:
        raise ModuleError(f"cannot lift a C_{C.n}-module to C_{N}")
    CN = build_category(C.species, N)
    dims = list(W.dims) + [0] * (N - C.n)
    action = [a.copy() for a in W.action]
    for i in range(C.size, CN.size):
        m = CN.morphisms[i]
        action.append(F.zeros((dims[m.target], dims[m.source])))
    return CModule(CN, F, dims, action)


def lift_hom(phi: ModuleHom, N: int) -> ModuleHom:
    F = phi.source.field
    extra = N - phi.source.category.n
    return ModuleHom(lift(phi.source, N), lift(phi.target, N), [m.copy() for m in phi.maps] + [F.zeros((0, 0))] * extra)


def shift(V: CModule) -> CModule:
    """``(Sigma V)_a = V_{a+1}``, acting through the self-embedding."""
    C = V.category
    if C.n < 1:
        raise ModuleError("shift needs N >= 1")
    iota = self_embedding(C)
    dims = V.dims[1:]
    action = [V.action[iota(i)].copy() for i in range(iota.source.size)]
    return CModule(iota.source, V.field, dims, action)


def shifted_representable(C: FiniteCategory, field: FieldSpec, x: int) -> CModule:
    """``Sigma(kC_N e_x)`` built directly over ``C_{N-1}``, without the ``C_N``-module."""
    if C.n < 1:
        raise ModuleError("shift needs N >= 1")
    if not 0 <= x <= C.n:
        raise ModuleError(f"object {x} not in C_{C.n}")
    iota = self_embedding(C)
    src = iota.source
    dims = [len(C.hom[(x, a + 1)]) for a in src.objects]
    action = []
    for i, m in enumerate(src.morphisms):
        M = field.zeros((dims[m.target], dims[m.source]))
        if dims[m.source]:
            rows = C.postcompose(iota(i), x)
            M[rows, np.arange(dims[m.source])] = field.one()
        action.append(M)
    return CModule(src, field, dims, action)


def shift_hom(phi: ModuleHom) -> ModuleHom:
    return ModuleHom(shift(phi.source), shift(phi.target), [m.copy() for m in phi.maps[1:]])


# -- homomorphism spaces -----------------------------------------------------

def module_hom_space(M: CModule, N: CModule) -> list[ModuleHom]:
    """Basis of ``Hom(M, N)``: solutions of ``phi_b M_alpha = N_alpha phi_a``."""
    if M.category is not N.category and (M.category.species, M.category.n) != (N.category.species, N.category.n):
        raise ModuleError("modules over different categories")
    if M.field != N.field:
        raise ModuleError("modules over different fields")
    C, F = M.category, M.field
    offsets, total = [], 0
    for x in C.objects:
        offsets.append(total)
        total += N.dims[x] * M.dims[x]
    blocks = []
    for i, m in enumerate(C.morphisms):
        a, b = m.source, m.target
        rows = N.dims[b] * M.dims[a]
        if rows == 0 or (N.dims[b] * M.dims[b] == 0 and N.dims[a] * M.dims[a] == 0):
            continue
        E = F.zeros((rows, total))
        # row-major vec: vec(X Y) = (X kron I) vec(Y) = (I kron Y^T) vec(X)
        if M.dims[b]:
            E[:, offsets[b]:offsets[b] + N.dims[b] * M.dims[b]] = F.reduce(
                np.kron(F.eye(N.dims[b]), M.action[i].T.copy()))
        if N.dims[a]:
            E[:, offsets[a]:offsets[a] + N.dims[a] * M.dims[a]] = F.reduce(
                E[:, offsets[a]:offsets[a] + N.dims[a] * M.dims[a]]
                - F.reduce(np.kron(N.action[i], F.eye(M.dims[a]))))
        blocks.append(E)
    if blocks:
        K = kernel_array(F, np.concatenate(blocks, axis=0))
    else:
        K = F.eye(total)
    out = []
    for j in range(K.shape[1]):
        maps = []
        for x in C.objects:
            seg = K[offsets[x]:offsets[x] + N.dims[x] * M.dims[x], j]
            maps.append(seg.reshape(N.dims[x], M.dims[x]).copy())
        out.append(ModuleHom(M, N, maps))
    return out


def hom_dimension(M: CModule, N: CModule) -> int:
    return len(module_hom_space(M, N))


# -- random modules ------------------------------------------------------------

def random_free(C: FiniteCategory, field: FieldSpec, rng: np.random.Generator, max_summands: int = 2,
                max_dim: int = 60) -> CModule:
    """A small direct sum of representables, avoiding summands above ``max_dim``."""
    choices = [x for x in C.objects if sum(len(C.hom[(x, y)]) for y in C.objects) <= max_dim]
    k = int(rng.integers(1, max_summands + 1))
    xs = sorted(int(rng.choice(choices)) for _ in range(k))
    return direct_sum(*[representable_projective(C, field, x) for x in xs])


def random_generators(V: CModule, rng: np.random.Generator, count: int) -> dict[int, np.ndarray]:
    F = V.field
    support = V.support()
    gens: dict[int, list] = {}
    for _ in range(count):
        x = int(rng.choice(support))
        gens.setdefault(x, []).append(F.random_array(rng, (V.dims[x], 1)))
    return {x: np.concatenate(vs, axis=1) for x, vs in gens.items()}


def random_short_exact(C: FiniteCategory, field: FieldSpec, rng: np.random.Generator, **kw):
    """``0 -> U -> P -> P/U -> 0`` with ``U`` generated by random elements of a small free ``P``."""
    P = random_free(C, field, rng, **kw)
    U, inc = submodule(P, _closure_basis(P, random_generators(P, rng, int(rng.integers(1, 3)))))
    Q, proj = quotient(P, inc.maps)
    return inc, proj


def random_module(C: FiniteCategory, field: FieldSpec, rng: np.random.Generator, **kw) -> CModule:
    inc, proj = random_short_exact(C, field, rng, **kw)
    return proj.target if rng.random() < 0.6 else inc.source
