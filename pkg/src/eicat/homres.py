"""Resolutions, Ext, projective and global dimension.

Two engines live here.  ``free_resolution`` covers syzygies by sums of
representables ``kCe_x`` and works over any field; Ext is read off the Hom
complex.  ``minimal_resolution`` iterates projective covers built from
induced projectives and needs every automorphism group to have order
invertible in the field.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field as dc_field
from functools import lru_cache

import numpy as np

from .algcore import invertibility_criterion, object_group_radical
from .catbuild import FiniteCategory, Species, aut_group, build_category, self_embedding
from .exactlinalg import FieldSpec, PreparedMatrix, QuotientMap, independent_columns, rank_array, rref_array
from .repmod import (
    CModule,
    GroupModule,
    ModuleHom,
    direct_sum,
    h0_data,
    induced_projective,
    kernel,
    orbit_data,
    radical_quotient_module,
    shifted_representable,
)


class RegimeError(ValueError):
    """Raised when a construction needs ``char k`` to avoid every ``|Aut(x)|``."""


def _kernel_free(F: FieldSpec, a: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Kernel basis ``K`` of ``a`` with ``K[free] = I``; coordinates of a kernel vector are its free entries."""
    m, n = a.shape
    if m == 0:
        return F.eye(n), list(range(n))
    R, pivots = rref_array(F, a)
    pset = set(pivots)
    free = [c for c in range(n) if c not in pset]
    K = F.zeros((n, len(free)))
    if free:
        K[free, np.arange(len(free))] = F.one()
        if pivots:
            K[pivots, :] = F.neg(R[: len(pivots)][:, free])
    return K, free


# -- the two kinds of module a resolution stage acts on ------------------------

class _ModuleSide:
    """A ``CModule`` seen through the operations the resolver needs."""

    def __init__(self, M: CModule):
        self.M = M
        self.C, self.F = M.category, M.field
        self.dims = list(M.dims)
        self._stacks: dict = {}

    def _stack(self, x, y):
        key = (x, y)
        if key not in self._stacks:
            hs = self.C.hom[(x, y)]
            if hs and self.dims[x] and self.dims[y]:
                S = np.stack([self.M.action[f] for f in hs])
                self._stacks[key] = PreparedMatrix(self.F, S.reshape(len(hs) * self.dims[y], self.dims[x]))
            else:
                self._stacks[key] = None
        return self._stacks[key]

    def images(self, v: np.ndarray, x: int, y: int) -> np.ndarray:
        H = len(self.C.hom[(x, y)])
        S = self._stack(x, y)
        if S is None:
            return self.F.zeros((self.dims[y], H))
        return S.matmul(v.reshape(-1, 1)).reshape(H, self.dims[y]).T.copy()

    def act(self, f: int, X: np.ndarray) -> np.ndarray:
        return self.F.matmul(self.M.action[f], X)

    def group_act(self, x: int, coeffs: np.ndarray, X: np.ndarray) -> np.ndarray:
        F = self.F
        ids = self.C.hom[(x, x)]
        acc = F.zeros((self.dims[x], self.dims[x]))
        for g in np.flatnonzero(coeffs != 0):
            acc = F.reduce(acc + coeffs[g] * self.M.action[ids[g]])
        return F.matmul(acc, X)


class FreeTerm:
    """``kCe_{x_0} + ... + kCe_{x_{r-1}}``; at ``y`` block ``i`` has basis ``hom(x_i, y)``."""

    def __init__(self, C: FiniteCategory, F: FieldSpec, objects: list[int]):
        self.C, self.F = C, F
        self.objects = list(objects)
        self.offsets, self.dims = [], []
        for y in C.objects:
            off, tot = [], 0
            for x in self.objects:
                off.append(tot)
                tot += len(C.hom[(x, y)])
            self.offsets.append(off)
            self.dims.append(tot)

    @property
    def rank(self) -> int:
        return len(self.objects)

    def block(self, v: np.ndarray, x: int, i: int) -> np.ndarray:
        o = self.offsets[x][i]
        return v[o:o + len(self.C.hom[(self.objects[i], x)])]

    def images(self, v: np.ndarray, x: int, y: int) -> np.ndarray:
        """Columns ``P_f(v)`` for ``f`` in ``hom(x, y)``."""
        C, F = self.C, self.F
        H = len(C.hom[(x, y)])
        out = F.zeros((self.dims[y], H))
        if H == 0:
            return out
        cols = np.arange(H)[:, None]
        for i, xi in enumerate(self.objects):
            if xi > x:
                continue
            blk = self.block(v, x, i)
            if len(blk) == 0 or not blk.any():
                continue
            T = C.table(xi, x, y)
            # f o - is injective on hom(xi, x), so no (row, col) pair repeats
            out[self.offsets[y][i] + T, cols] = blk[None, :]
        return out

    def act(self, f: int, X: np.ndarray) -> np.ndarray:
        C, F = self.C, self.F
        a, b = int(C.source[f]), int(C.target[f])
        out = F.zeros((self.dims[b], X.shape[1]))
        for i, xi in enumerate(self.objects):
            if xi > a:
                continue
            post = C.postcompose(f, xi)
            oa = self.offsets[a][i]
            out[self.offsets[b][i] + post] = X[oa:oa + len(post)]
        return out

    def group_act(self, x: int, coeffs: np.ndarray, X: np.ndarray) -> np.ndarray:
        C, F = self.C, self.F
        out = F.zeros((self.dims[x], X.shape[1]))
        support = np.flatnonzero(coeffs != 0)
        for i, xi in enumerate(self.objects):
            if xi > x:
                continue
            T = C.table(xi, x, x)
            hx = T.shape[1]
            L = F.zeros((hx, hx))
            ar = np.arange(hx)
            for g in support:
                L[T[g], ar] = F.reduce(L[T[g], ar] + coeffs[g])
            o = self.offsets[x][i]
            out[o:o + hx] = F.matmul(L, X[o:o + hx])
        return out


@lru_cache(maxsize=None)
def _radical_right_generators(species: Species, n: int, field: FieldSpec, x: int) -> tuple:
    """Elements ``j_1..j_m`` of ``J(kAut(x))`` with ``J = sum j_i kAut(x)``; then ``J V = sum j_i V``."""
    C = build_category(species, n)
    J = object_group_radical(C, field, x)
    if J.shape[1] == 0:
        return ()
    G = aut_group(C, x)
    F = field
    gens, span = [], F.zeros((G.order, 0))
    target = rank_array(F, J)
    for c in range(J.shape[1]):
        j = J[:, c]
        test = np.concatenate([span, j.reshape(-1, 1)], axis=1)
        if rank_array(F, test) == span.shape[1]:
            continue
        gens.append(j.copy())
        # right multiples j*g for all g
        R = F.zeros((G.order, G.order))
        for h in np.flatnonzero(j != 0):
            for g in range(G.order):
                R[G.table[h][g], g] = F.scalar(R[G.table[h][g], g] + j[h])
        span = independent_columns(F, np.concatenate([span, R], axis=1))
        if span.shape[1] == target:
            break
    return tuple(gens)


@dataclass
class FreeStage:
    objects: list[int]
    vectors: list[np.ndarray]  # image of generator j in the previous term (or M) at objects[j]


class FreeResolution:
    """A free resolution ``... -> P^1 -> P^0 -> M`` built one stage at a time.

    Each stage covers the current syzygy by representables on lifts of a
    basis of its top (the syzygy modulo images from below and the
    automorphism-group radical), pruned greedily by ``kAut(x)``-span.
    """

    def __init__(self, M: CModule, seed: int = 0):
        self.module = M
        self.category, self.field = M.category, M.field
        self.stages: list[FreeStage] = []
        self.terms: list[FreeTerm] = []
        self._side = _ModuleSide(M)
        F = self.field
        self._basis = [F.eye(d) for d in M.dims]
        self._free = [list(range(d)) for d in M.dims]
        self._maps: list[list[np.ndarray]] = []  # per stage, per object: previous ambient x term
        self._pending = False  # kernel of the newest stage not computed yet
        self._rng = np.random.default_rng(seed)
        # over small fields a random vector often misses part of the top
        self.tries = 1 if self.field.characteristic > 100 else 6

    def _syzygy(self):
        # kernels are only needed to add the next stage, so the last (and
        # largest) one is computed lazily
        if self._pending:
            pairs = [_kernel_free(self.field, D) for D in self._maps[-1]]
            self._basis = [K for K, _ in pairs]
            self._free = [fr for _, fr in pairs]
            self._pending = False

    @property
    def complete(self) -> bool:
        """True once the current syzygy is zero."""
        self._syzygy()
        return all(B.shape[1] == 0 for B in self._basis)

    @property
    def ranks(self) -> list[int]:
        return [t.rank for t in self.terms]

    @property
    def length(self) -> int | None:
        return len(self.terms) - 1 if self.complete else None

    def _top_generators(self, x: int):
        C, F = self.category, self.field
        side = self.terms[-1] if self.terms else self._side
        B = self._basis[x]
        dK = B.shape[1]
        if dK == 0:
            return []
        free = self._free[x]
        parts = []
        if x > 0 and self._basis[x - 1].shape[1]:
            for f in C.hom[(x - 1, x)]:
                parts.append(side.act(f, self._basis[x - 1]))
        for j in _radical_right_generators(C.species, C.n, F, x):
            parts.append(side.group_act(x, j, B))
        R = np.concatenate(parts, axis=1)[free] if parts else F.zeros((dK, 0))
        if F.characteristic and R.shape[1] > 2 * dK + 32:
            # The span is all that matters.  Random combinations keep it with
            # overwhelming probability, and a shortfall would only add
            # redundant generators, never break exactness.
            R = F.matmul(R, F.random_array(self._rng, (R.shape[1], dK + 32)))
        Q = QuotientMap(F, dK, R)
        t = Q.dim
        if t == 0:
            return []
        # Over F_p generators are random top vectors; of a few tries keep the one
        # whose kAut(x)-span covers the most, so ranks stay near the minimum.
        # Over Q random combinations make denominators explode in later
        # kernels, so there the first uncovered basis vector is taken instead.
        chosen = []
        rest = QuotientMap(F, t, F.zeros((t, 0)))
        while rest.dim:
            if F.characteristic == 0:
                candidates = [rest.lift[:, :1]]
            else:
                candidates = (F.matmul(rest.lift, F.random_array(self._rng, (rest.dim, 1))) for _ in range(self.tries))
            best = None
            for c in candidates:
                orbit = F.matmul(Q.project, side.images(F.matmul(B, F.matmul(Q.lift, c))[:, 0], x, x)[free])
                gain = rank_array(F, rest(orbit))
                if best is None or gain > best[1]:
                    best = (c, gain, orbit)
                if gain == rest.dim:
                    break
            c, gain, orbit = best
            if gain == 0:
                continue
            # rescaling a generator changes nothing; integral ones keep entries small over Q
            chosen.append(F.primitive(F.matmul(B, F.matmul(Q.lift, c))[:, 0]))
            covered = np.concatenate([rest.basis, orbit], axis=1)
            rest = QuotientMap(F, t, covered)
        return chosen

    def extend(self) -> bool:
        """Add one stage; False when the syzygy is already zero."""
        if self.terms and self.complete:
            return False
        self._syzygy()
        C, F = self.category, self.field
        side = self.terms[-1] if self.terms else self._side
        objects, vectors = [], []
        for x in C.objects:
            for v in self._top_generators(x):
                objects.append(x)
                vectors.append(v)
        term = FreeTerm(C, F, objects)
        maps = []
        for y in C.objects:
            cols = [side.images(v, x, y) for x, v in zip(objects, vectors)]
            maps.append(np.concatenate(cols, axis=1) if cols else F.zeros((side.dims[y], 0)))
        self.stages.append(FreeStage(objects, vectors))
        self.terms.append(term)
        self._maps.append(maps)
        self._pending = True
        return True

    def ensure(self, stages: int) -> "FreeResolution":
        """Build until ``P^0..P^{stages-1}`` exist or the resolution ends."""
        while len(self.terms) < stages and self.extend():
            pass
        return self

    def differential(self, s: int) -> list[dict[int, np.ndarray]]:
        """Right-multiplication data of ``P^s -> P^{s-1}``: per generator ``j``, block ``i`` in ``k hom(x_i, x_j)``."""
        if s < 1:
            raise ValueError("differentials start at s = 1")
        prev = self.terms[s - 1]
        out = []
        for x, v in zip(self.stages[s].objects, self.stages[s].vectors):
            out.append({i: prev.block(v, x, i).copy() for i in range(prev.rank) if prev.objects[i] <= x})
        return out

    def exactness_defects(self) -> list[tuple]:
        """Stages and objects where image and kernel disagree."""
        F = self.field
        bad = []
        if self._maps:
            for y in self.category.objects:
                if rank_array(F, self._maps[0][y]) != self.module.dims[y]:
                    bad.append(("augmentation", y))
        for s in range(1, len(self._maps)):
            for y in self.category.objects:
                A, B = self._maps[s - 1][y], self._maps[s][y]
                if A.shape[1] and B.shape[1] and np.any(F.matmul(A, B) != 0):
                    bad.append(("not a complex", s, y))
                if rank_array(F, B) != A.shape[1] - rank_array(F, A):
                    bad.append(("homology", s, y))
        if self.complete and self._maps:
            for y in self.category.objects:
                A = self._maps[-1][y]
                if rank_array(F, A) != A.shape[1]:
                    bad.append(("last map not injective", y))
        return bad

    def to_json(self) -> dict:
        F = self.field
        return {
            "ranks": self.ranks,
            "objects": [st.objects for st in self.stages],
            "complete": self.complete,
            "differentials": [
                [{str(i): [str(F.scalar(c)) for c in blk] for i, blk in gen.items()} for gen in self.differential(s)]
                for s in range(1, len(self.stages))
            ],
        }


def free_resolution(M: CModule, max_len: int) -> FreeResolution:
    """Free resolution through ``P^{max_len}`` (fewer terms if a syzygy vanishes)."""
    res = FreeResolution(M)
    if M.is_zero():
        return res
    return res.ensure(max_len + 1)


class HomComplex:
    """``Hom(P^., T)`` for a free resolution; Yoneda gives ``Hom(kCe_x, T) = T_x``."""

    def __init__(self, res: FreeResolution, T: CModule):
        self.res, self.T = res, T
        self.F = res.field
        self._stacks: dict = {}
        self._ranks: dict[int, int] = {}

    def _stack(self, a, b):
        key = (a, b)
        if key not in self._stacks:
            C, T = self.res.category, self.T
            hs = C.hom[(a, b)]
            S = None
            if hs and T.dims[a] and T.dims[b]:
                S = np.stack([T.action[h] for h in hs]).reshape(len(hs), T.dims[b] * T.dims[a])
                S = PreparedMatrix(self.F, S.T.copy()) if S.any() else None
            self._stacks[key] = S
        return self._stacks[key]

    def hom_dim(self, s: int) -> int:
        self.res.ensure(s + 1)
        if s >= len(self.res.terms):
            return 0
        return sum(self.T.dims[x] for x in self.res.terms[s].objects)

    def coboundary(self, s: int) -> np.ndarray:
        """Matrix of ``Hom(P^s, T) -> Hom(P^{s+1}, T)``."""
        res, T, F = self.res, self.T, self.F
        res.ensure(s + 2)
        src = res.terms[s].objects if s < len(res.terms) else []
        tgt = res.terms[s + 1].objects if s + 1 < len(res.terms) else []
        cin = np.cumsum([0] + [T.dims[x] for x in src])
        cout = np.cumsum([0] + [T.dims[x] for x in tgt])
        D = F.zeros((int(cout[-1]), int(cin[-1])))
        if not tgt or not src:
            return D
        prev = res.terms[s]
        for j, (xj, v) in enumerate(zip(res.stages[s + 1].objects, res.stages[s + 1].vectors)):
            if not T.dims[xj]:
                continue
            for i, xi in enumerate(src):
                if xi > xj or not T.dims[xi]:
                    continue
                S = self._stack(xi, xj)
                if S is None:
                    continue
                blk = prev.block(v, xj, i)
                if not blk.any():
                    continue
                val = S.matmul(blk.reshape(-1, 1)).reshape(T.dims[xj], T.dims[xi])
                D[cout[j]:cout[j + 1], cin[i]:cin[i + 1]] = val
        return D

    def rank(self, s: int) -> int:
        if s < 0:
            return 0
        if s not in self._ranks:
            self._ranks[s] = rank_array(self.F, self.coboundary(s))
        return self._ranks[s]

    def ext_dim(self, s: int) -> int:
        return self.hom_dim(s) - self.rank(s) - self.rank(s - 1)


def ext_dims(M: CModule, T: CModule, max_i: int) -> list[int]:
    """``dim Ext^i(M, T)`` for ``i = 0..max_i``."""
    if M.is_zero():
        return [0] * (max_i + 1)
    H = HomComplex(FreeResolution(M), T)
    return [H.ext_dim(i) for i in range(max_i + 1)]


# -- projective and global dimension -------------------------------------------

@dataclass
class PDResult:
    value: int | None  # None when Ext against A/J survives through the bound
    bound: int
    ext: list[int]  # dim Ext^i(M, A/J), i = 0.. as far as computed

    @property
    def exceeds(self) -> bool:
        return self.value is None

    def __str__(self):
        return f"exceeds bound {self.bound}" if self.value is None else str(self.value)

    def to_json(self):
        return {"value": self.value if self.value is not None else f"exceeds bound {self.bound}",
                "bound": self.bound, "ext_against_top": self.ext}


def _pd_against(M: CModule, T: CModule, bound: int) -> PDResult:
    if M.is_zero():
        return PDResult(0, bound, [0])
    H = HomComplex(FreeResolution(M), T)
    ext = [H.ext_dim(0)]
    for i in range(1, bound + 1):
        ext.append(H.ext_dim(i))
        if ext[-1] == 0:
            return PDResult(i - 1, bound, ext)
    return PDResult(None, bound, ext)


def projective_dimension(M: CModule, bound: int) -> PDResult:
    """``pd(M)``: the first vanishing ``Ext^{m+1}(M, A/J)`` with ``m + 1 <= bound`` gives ``m``."""
    if bound < 0:
        raise ValueError("bound must be >= 0")
    return _pd_against(M, radical_quotient_module(M.category, M.field), bound)


def is_projective(V: CModule) -> bool:
    if V.is_zero():
        return True
    H = HomComplex(FreeResolution(V), radical_quotient_module(V.category, V.field))
    return H.ext_dim(1) == 0


def radical_quotient_summand(C: FiniteCategory, field: FieldSpec, x: int) -> CModule:
    """The summand ``kAut(x)/J`` of ``A/J`` sitting at ``x``."""
    T = radical_quotient_module(C, field)
    dims = [T.dims[y] if y == x else 0 for y in C.objects]
    action = []
    for i, m in enumerate(C.morphisms):
        if m.source == m.target == x:
            action.append(T.action[i])
        else:
            action.append(field.zeros((dims[m.target], dims[m.source])))
    return CModule(C, field, dims, action)


def predicted_global_dimension(species: Species, n: int, field: FieldSpec) -> int | None:
    """Closed form by species; None means infinite."""
    if n == 0:
        return 0  # the algebra is k
    kind, p = species.kind, field.characteristic
    if kind in ("OI", "OI_d"):
        return n
    if kind in ("FI", "FI_d"):
        order = math.factorial(n)
    elif kind == "FI_G":
        order = math.factorial(n) * species.group.order ** n
    elif kind == "OI_G":
        order = species.group.order
    elif kind == "VI":
        q = species.q
        order = math.prod(q ** n - q ** i for i in range(n))
    else:
        raise ValueError(f"unknown species {kind}")
    return None if p and order % p == 0 else n


@dataclass
class GlobalDimReport:
    species: Species
    n: int
    field: FieldSpec
    predicted: int | None
    computed: PDResult
    criterion: object  # InvertibilityReport
    per_object: dict = dc_field(default_factory=dict)

    @property
    def bound(self) -> int:
        return self.computed.bound

    @property
    def agrees(self) -> bool:
        if self.predicted is None:
            return self.computed.exceeds and not self.criterion.holds
        return self.computed.value == self.predicted

    def predicted_str(self) -> str:
        return "inf" if self.predicted is None else str(self.predicted)

    def computed_str(self) -> str:
        return str(self.computed)

    def to_json(self) -> dict:
        return {
            "species": self.species.label,
            "params": self.species.params(),
            "n": self.n,
            "field": str(self.field),
            "predicted": self.predicted_str(),
            "computed": self.computed_str(),
            "bound": self.bound,
            "agrees": self.agrees,
            "criterion": self.criterion.to_json(),
            "per_object_pd": {str(x): r.to_json() for x, r in self.per_object.items()},
        }


def global_dimension(C: FiniteCategory, field: FieldSpec, bound: int | None = None) -> GlobalDimReport:
    """``pd(A/J)``, summand by summand from the top object down.

    ``A/J`` is the sum of its pieces at each object, so its projective
    dimension is the largest of theirs; a piece whose Ext survives past the
    bound settles the answer and the rest are skipped.
    """
    n = C.n
    bound = n + 4 if bound is None else bound
    T = radical_quotient_module(C, field)
    per = {}
    worst = PDResult(0, bound, [])
    # Summands whose group algebra is not semisimple are the likely culprits
    # for an unbounded answer, and the smallest of them is the cheapest to
    # resolve; after that, go from the top object down.
    p = field.characteristic
    modular = [x for x in C.objects if p and C.species.aut_order(x) % p == 0]
    order = modular[:1] + [x for x in reversed(C.objects) if x not in modular[:1]]
    for x in order:
        r = _pd_against(radical_quotient_summand(C, field, x), T, bound)
        per[x] = r
        if r.exceeds:
            worst = r
            break
        if r.value > (worst.value or 0) or not worst.ext:
            worst = r
    computed = PDResult(worst.value, bound, worst.ext)
    return GlobalDimReport(C.species, n, field, predicted_global_dimension(C.species, n, field), computed,
                           invertibility_criterion(C, field), per)


# -- minimal resolutions in the semisimple regime ------------------------------

def _require_regime(C: FiniteCategory, field: FieldSpec):
    rep = invertibility_criterion(C, field)
    if not rep.holds:
        bad = [r["object"] for r in rep.per_object if r["char_divides"]]
        raise RegimeError(
            f"characteristic {field.characteristic} divides |Aut(x)| for x in {bad}; "
            "minimal resolutions need the semisimple regime, use the free resolution instead")


@dataclass
class ProjectiveCover:
    projective: CModule
    surjection: ModuleHom
    pieces: list[tuple[int, GroupModule]]  # (x, W_x) in increasing x

    @property
    def multiset(self) -> list[tuple[int, int]]:
        return [(x, W.dim) for x, W in self.pieces]


def _equivariant_section(V: CModule, x: int, Q: QuotientMap, Haction: list[np.ndarray]) -> np.ndarray:
    """A ``kAut(x)``-linear right inverse of ``V_x -> H_0(V)_x``, by averaging."""
    C, F = V.category, V.field
    G = aut_group(C, x)
    ids = C.hom[(x, x)]
    s0 = Q.lift
    acc = F.zeros(s0.shape)
    for g in range(G.order):
        acc = F.reduce(acc + F.matmul(V.action[ids[g]], F.matmul(s0, Haction[G.inv(g)])))
    return F.reduce(acc * F.inv(F.scalar(G.order)))


def projective_cover(V: CModule) -> ProjectiveCover:
    C, F = V.category, V.field
    _require_regime(C, F)
    H = h0_data(V)
    pieces, sections = [], []
    for x in C.objects:
        t = H.module.dims[x]
        if not t:
            continue
        ids = C.hom[(x, x)]
        Hact = [H.module.action[i] for i in ids]
        W = GroupModule(aut_group(C, x), F, t, Hact)
        pieces.append((x, W))
        sections.append(_equivariant_section(V, x, H.quotients[x], Hact))
    if not pieces:
        P = CModule(C, F, [0] * (C.n + 1), [F.zeros((0, 0)) for _ in range(C.size)])
        return ProjectiveCover(P, ModuleHom(P, V, [F.zeros((d, 0)) for d in V.dims]), [])
    P = direct_sum(*[induced_projective(C, F, x, W) for x, W in pieces])
    maps = []
    for y in C.objects:
        cols = []
        for (x, W), s in zip(pieces, sections):
            hom_xy = C.hom[(x, y)]
            for r in orbit_data(C, x, y).reps:
                cols.append(F.matmul(V.action[hom_xy[r]], s))
        maps.append(np.concatenate(cols, axis=1) if cols else F.zeros((V.dims[y], 0)))
    return ProjectiveCover(P, ModuleHom(P, V, maps), pieces)


@dataclass
class BettiTable:
    """Entry ``(s, x)``: dimension of ``H_0(P^s)`` at ``x``."""

    rows: list[list[int]]

    def support(self) -> set[tuple[int, int]]:
        return {(s, x) for s, row in enumerate(self.rows) for x, v in enumerate(row) if v}

    def is_linear(self, offset: int) -> bool:
        return all(x == s + offset for s, x in self.support())

    def to_csv(self) -> str:
        width = max((len(r) for r in self.rows), default=0)
        lines = ["s," + ",".join(str(x) for x in range(width))]
        for s, row in enumerate(self.rows):
            lines.append(f"{s}," + ",".join(str(v) for v in row))
        return "\n".join(lines) + "\n"


@dataclass
class MinimalResolution:
    source: CModule
    covers: list[ProjectiveCover]
    maps: list[ModuleHom]  # maps[0]: P^0 -> V; maps[s]: P^s -> P^{s-1}
    complete: bool

    @property
    def terms(self) -> list[CModule]:
        return [c.projective for c in self.covers]

    @property
    def length(self) -> int | None:
        return len(self.covers) - 1 if self.complete else None

    def betti(self) -> BettiTable:
        n = self.source.category.n
        rows = []
        for c in self.covers:
            row = [0] * (n + 1)
            for x, d in c.multiset:
                row[x] += d
            rows.append(row)
        return BettiTable(rows)

    def exactness_defects(self) -> list[tuple]:
        F = self.source.field
        bad = []
        if self.maps and not self.maps[0].is_surjective():
            bad.append(("augmentation",))
        for s in range(1, len(self.maps)):
            A, B = self.maps[s - 1], self.maps[s]
            for y, (a, b) in enumerate(zip(A.maps, B.maps)):
                if a.shape[1] and b.shape[1] and np.any(F.matmul(a, b) != 0):
                    bad.append(("not a complex", s, y))
                if rank_array(F, b) != a.shape[1] - rank_array(F, a):
                    bad.append(("homology", s, y))
        if self.complete and self.maps and not self.maps[-1].is_injective():
            bad.append(("last map not injective",))
        return bad

    def to_json(self) -> dict:
        return {"length": self.length, "complete": self.complete,
                "terms": [[list(p) for p in c.multiset] for c in self.covers],
                "betti": self.betti().rows}


def minimal_resolution(V: CModule, max_len: int | None = None) -> MinimalResolution:
    """Iterated projective covers of syzygies; ``complete`` is False if ``max_len`` ran out."""
    C, F = V.category, V.field
    _require_regime(C, F)
    max_len = C.n + 2 if max_len is None else max_len
    covers, maps = [], []
    Z, inc = V, None
    for s in range(max_len + 1):
        if Z.is_zero():
            return MinimalResolution(V, covers, maps, True)
        cov = projective_cover(Z)
        covers.append(cov)
        maps.append(cov.surjection if inc is None else inc.compose(cov.surjection))
        Z, inc = kernel(cov.surjection)
    return MinimalResolution(V, covers, maps, Z.is_zero())


def hom_dims_from_covers(res: MinimalResolution, T: CModule) -> list[int]:
    """``dim Hom(P^s, T)`` per term, via ``Hom(kCe_x (x) W, T) = Hom_{kAut(x)}(W, T_x)``."""
    F = T.field
    C = T.category
    out = []
    for cov in res.covers:
        total = 0
        for x, W in cov.pieces:
            dT = T.dims[x]
            if not dT:
                continue
            ids = C.hom[(x, x)]
            rows = []
            for g in W.group.generators() or [W.group.identity]:
                # T_g X - X W_g = 0 with X row-major
                E = F.reduce(np.kron(T.action[ids[g]], F.eye(W.dim)) - np.kron(F.eye(dT), W.action[g].T.copy()))
                rows.append(E)
            total += dT * W.dim - rank_array(F, np.concatenate(rows, axis=0))
        out.append(total)
    return out


def homological_degrees(V: CModule, max_s: int) -> list[int]:
    """``hd_s(V)`` as the generating degree of the ``s``-th minimal term, ``-1`` once terms vanish."""
    res = minimal_resolution(V, max_s)
    out = []
    for s in range(max_s + 1):
        if s < len(res.covers) and res.covers[s].pieces:
            out.append(max(x for x, _ in res.covers[s].pieces))
        else:
            out.append(-1)
    return out


# -- the shift of a representable ------------------------------------------------

# dense storage of the shifted module beyond this many matrix entries is skipped
SHIFT_DENSE_LIMIT = 20_000_000


@dataclass
class GeneticShiftReport:
    species: str
    N: int
    x: int
    dims: tuple
    h0_dims: tuple
    cover_dims: tuple  # dimension vector of the projective cover built from h0
    ext_projective: bool | None  # Ext^1 against A/J vanishes; None when too large to store
    expected_support: list[int]
    h0_agrees: bool | None = None  # counted H_0 equals the linear-algebra H_0; None when not stored

    @property
    def support(self) -> list[int]:
        return [y for y, d in enumerate(self.h0_dims) if d]

    @property
    def projective(self) -> bool:
        return self.cover_dims == self.dims and self.ext_projective is not False

    @property
    def passed(self) -> bool:
        return self.projective and self.support == self.expected_support and self.h0_agrees is not False

    def to_json(self) -> dict:
        return {"species": self.species, "N": self.N, "x": self.x, "dims": list(self.dims),
                "h0_dims": list(self.h0_dims), "cover_dims": list(self.cover_dims),
                "ext_projective": self.ext_projective, "h0_agrees": self.h0_agrees, "projective": self.projective,
                "support": self.support, "expected_support": self.expected_support, "passed": self.passed}


def _shifted_h0_dims(C: FiniteCategory, x: int) -> list[int]:
    """``H_0`` of ``Sigma(kC_N e_x)`` by counting basis morphisms.

    Every action matrix sends basis vectors to basis vectors, so the image
    from smaller objects is spanned by the basis morphisms it hits.
    """
    iota = self_embedding(C)
    src = iota.source
    out = []
    for a in src.objects:
        hit = set()
        for b in range(a):
            if not C.hom[(x, b + 1)]:
                continue
            for alpha in src.hom[(b, a)]:
                hit.update(C.postcompose(iota(alpha), x).tolist())
        out.append(len(C.hom[(x, a + 1)]) - len(hit))
    return out


def verify_genetic_shift(C: FiniteCategory, field: FieldSpec, x: int) -> GeneticShiftReport:
    """Shift ``kC_N e_x`` down to ``C_{N-1}``; it should be projective and generated in degrees ``x-1`` and ``x``.

    In the semisimple regime a module is projective exactly when its
    dimension vector equals that of the projective cover of its ``H_0``.
    When the module is small enough to store densely, ``Ext^1`` against
    ``A/J`` is checked as well.
    """
    N = C.n
    if not 0 <= x <= N - 1:
        raise ValueError(f"need 0 <= x <= N-1, got x={x}, N={N}")
    src = build_category(C.species, N - 1)
    _require_regime(src, field)
    dims = tuple(len(C.hom[(x, a + 1)]) for a in src.objects)
    h0_dims = _shifted_h0_dims(C, x)
    cover = tuple(
        sum(h0_dims[a] * len(src.hom[(a, y)]) // len(src.hom[(a, a)]) for a in range(y + 1)) for y in src.objects
    )
    entries = sum(len(src.hom[(a, b)]) * dims[a] * dims[b] for b in src.objects for a in range(b + 1))
    ext_projective = h0_agrees = None
    if entries <= SHIFT_DENSE_LIMIT:
        S = shifted_representable(C, field, x)
        h0_agrees = tuple(h0_data(S).module.dims) == tuple(h0_dims)
        ext_projective = is_projective(S)
    expected = [x] if x == 0 else [x - 1, x]
    return GeneticShiftReport(C.species.label, N, x, dims, tuple(h0_dims), cover, ext_projective, expected,
                              h0_agrees)


def dumps(obj) -> str:
    return json.dumps(obj.to_json(), sort_keys=True)
