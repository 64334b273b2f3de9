"""Skeletal truncations of FI, FI_G, FI_d, OI, OI_G, OI_d and VI.

Objects are ``0..n`` (the sets ``[x]``, or ``F_q^x`` for VI).  Morphism
payloads:

* FI, OI: the injection as a value tuple ``f`` with ``f[i-1] = f(i)``;
* FI_G, OI_G: ``(f, g)`` with ``g`` a tuple of group-element indices;
* FI_d, OI_d: ``(f, delta)`` with ``delta`` the colours of ``[b] - f([a])``
  listed in increasing order of the uncoloured points;
* VI: the ``b x a`` matrix over F_q as a tuple of rows.

Morphisms are numbered globally by ``(target, source, payload)``, so the
morphisms of the truncation ``C_m`` are exactly the first ones of ``C_n``.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .exactlinalg import _is_prime
from .groups import FiniteGroup, GroupTableError, builtin_group

KINDS = ("FI", "FI_G", "FI_d", "OI", "OI_G", "OI_d", "VI")
ORDERED = {"OI", "OI_G", "OI_d"}


class SpeciesError(ValueError):
    pass


@dataclass(frozen=True)
class Species:
    kind: str
    group: FiniteGroup | None = None
    d: int | None = None
    q: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SpeciesError(f"unknown species {self.kind!r}")
        if self.kind in ("FI_G", "OI_G"):
            if self.group is None:
                raise SpeciesError(f"{self.kind} needs a group")
            try:
                self.group.validate()
            except GroupTableError as exc:
                raise SpeciesError(str(exc)) from exc
        elif self.group is not None:
            raise SpeciesError(f"{self.kind} takes no group")
        if self.kind in ("FI_d", "OI_d"):
            if self.d is None or self.d < 1:
                raise SpeciesError(f"{self.kind} needs d >= 1")
        elif self.d is not None:
            raise SpeciesError(f"{self.kind} takes no d")
        if self.kind == "VI":
            if self.q is None or not _is_prime(self.q):
                raise SpeciesError(f"VI needs a prime q, got {self.q}")
        elif self.q is not None:
            raise SpeciesError(f"{self.kind} takes no q")

    @classmethod
    def parse(cls, kind: str, group: str | FiniteGroup | None = None, d: int | None = None,
              q: int | None = None) -> "Species":
        table = {k.lower(): k for k in KINDS}
        key = kind.lower()
        if key not in table:
            raise SpeciesError(f"unknown species {kind!r}")
        kind = table[key]
        if isinstance(group, str):
            group = builtin_group(group)
        return cls(kind, group if kind in ("FI_G", "OI_G") else None,
                   d if kind in ("FI_d", "OI_d") else None, q if kind == "VI" else None)

    @property
    def ordered(self) -> bool:
        return self.kind in ORDERED

    @property
    def label(self) -> str:
        if self.group is not None:
            return f"{self.kind}[{self.group.name}]"
        if self.d is not None:
            return f"{self.kind}[d={self.d}]"
        if self.q is not None:
            return f"{self.kind}[q={self.q}]"
        return self.kind

    def params(self) -> dict:
        out: dict = {}
        if self.group is not None:
            out["group"] = self.group.name
            out["group_order"] = self.group.order
        if self.d is not None:
            out["d"] = self.d
        if self.q is not None:
            out["q"] = self.q
        return out

    def hom_count(self, a: int, b: int) -> int:
        """Closed-form size of ``hom(a, b)``."""
        if a > b:
            return 0
        inj = math.perm(b, a)
        sub = math.comb(b, a)
        if self.kind == "FI":
            return inj
        if self.kind == "OI":
            return sub
        if self.kind == "FI_G":
            return inj * self.group.order**a
        if self.kind == "OI_G":
            return sub * self.group.order**a
        if self.kind == "FI_d":
            return inj * self.d ** (b - a)
        if self.kind == "OI_d":
            return sub * self.d ** (b - a)
        return math.prod(self.q**b - self.q**i for i in range(a))

    def aut_order(self, x: int) -> int:
        """Closed-form ``|Aut(x)|``."""
        if self.kind in ("FI", "FI_d"):
            return math.factorial(x)
        if self.kind in ("OI", "OI_d"):
            return 1
        if self.kind == "FI_G":
            return math.factorial(x) * self.group.order**x
        if self.kind == "OI_G":
            return self.group.order**x
        return math.prod(self.q**x - self.q**i for i in range(x))


@dataclass(frozen=True)
class Morphism:
    source: int
    target: int
    payload: tuple


# -- enumeration ----------------------------------------------------------

def _rank_mod(rows: list[list[int]], q: int) -> int:
    m = [r[:] for r in rows]
    rank, ncols = 0, len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(m)) if m[i][c] % q), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = pow(m[rank][c], -1, q)
        m[rank] = [(x * inv) % q for x in m[rank]]
        for i in range(len(m)):
            if i != rank and m[i][c] % q:
                f = m[i][c]
                m[i] = [(x - f * y) % q for x, y in zip(m[i], m[rank])]
        rank += 1
    return rank


def _injections(sp: Species, a: int, b: int):
    if sp.ordered:
        return itertools.combinations(range(1, b + 1), a)
    return itertools.permutations(range(1, b + 1), a)


def enumerate_hom(sp: Species, a: int, b: int) -> list[tuple]:
    """All payloads of ``hom(a, b)`` in lexicographic order."""
    if a > b:
        return []
    if sp.kind == "VI":
        q = sp.q
        out = []
        for flat in itertools.product(range(q), repeat=a * b):
            rows = [list(flat[i * a:(i + 1) * a]) for i in range(b)]
            if a == 0 or _rank_mod(rows, q) == a:
                out.append(tuple(tuple(r) for r in rows))
        return out
    injections = list(_injections(sp, a, b))
    if sp.kind in ("FI", "OI"):
        return [tuple(f) for f in injections]
    if sp.kind in ("FI_G", "OI_G"):
        gs = list(itertools.product(range(sp.group.order), repeat=a))
        return [(tuple(f), g) for f in injections for g in gs]
    colourings = list(itertools.product(range(1, sp.d + 1), repeat=b - a))
    return [(tuple(f), c) for f in injections for c in colourings]


def _complement(f: tuple, b: int) -> list[int]:
    im = set(f)
    return [x for x in range(1, b + 1) if x not in im]


def compose_payload(sp: Species, g: tuple, f: tuple, a: int, b: int, c: int) -> tuple:
    """Payload of ``g o f`` for ``f: a -> b`` and ``g: b -> c``."""
    kind = sp.kind
    if kind in ("FI", "OI"):
        return tuple(g[x - 1] for x in f)
    if kind in ("FI_G", "OI_G"):
        f1, g1 = f
        f2, g2 = g
        t = sp.group.table
        return tuple(f2[x - 1] for x in f1), tuple(t[g2[f1[i] - 1]][g1[i]] for i in range(a))
    if kind in ("FI_d", "OI_d"):
        f1, d1 = f
        f2, d2 = g
        f3 = tuple(f2[x - 1] for x in f1)
        pos1 = {r: i for i, r in enumerate(_complement(f1, b))}
        pos2 = {x: i for i, x in enumerate(_complement(f2, c))}
        pre = {y: r for r, y in enumerate(f2, start=1)}
        d3 = []
        for x in _complement(f3, c):
            if x in pre:
                d3.append(d1[pos1[pre[x]]])
            else:
                d3.append(d2[pos2[x]])
        return f3, tuple(d3)
    q = sp.q
    return tuple(
        tuple(sum(g[i][k] * f[k][j] for k in range(b)) % q for j in range(a)) for i in range(c)
    )


def identity_payload(sp: Species, a: int) -> tuple:
    f = tuple(range(1, a + 1))
    if sp.kind in ("FI", "OI"):
        return f
    if sp.kind in ("FI_G", "OI_G"):
        return f, (sp.group.identity,) * a
    if sp.kind in ("FI_d", "OI_d"):
        return f, ()
    return tuple(tuple(1 if i == j else 0 for j in range(a)) for i in range(a))


def embed_payload(sp: Species, payload: tuple, a: int, b: int) -> tuple:
    """The self-embedding on payloads: ``[a] -> [b]`` becomes ``[a+1] -> [b+1]``.

    The new point becomes the minimum; it is fixed by the injection, carries
    the group identity, and (being in the image) needs no colour.  For VI the
    new basis vector is prepended.
    """
    if sp.kind == "VI":
        rows = [(1,) + (0,) * a]
        rows += [(0,) + tuple(r) for r in payload]
        return tuple(rows)
    if sp.kind in ("FI", "OI"):
        return (1,) + tuple(x + 1 for x in payload)
    f, extra = payload
    f2 = (1,) + tuple(x + 1 for x in f)
    if sp.kind in ("FI_G", "OI_G"):
        return f2, (sp.group.identity,) + tuple(extra)
    return f2, tuple(extra)


# -- the category ---------------------------------------------------------

class FiniteCategory:
    """The skeletal truncation ``C_n`` with enumerated hom-sets."""

    def __init__(self, species: Species, n: int):
        if n < 0:
            raise ValueError("truncation level must be >= 0")
        self.species = species
        self.n = n
        self.morphisms: list[Morphism] = []
        self.hom: dict[tuple[int, int], list[int]] = {}
        self._index: dict[tuple[int, int, tuple], int] = {}
        for b in range(n + 1):
            for a in range(b + 1):
                ids = []
                for payload in enumerate_hom(species, a, b):
                    idx = len(self.morphisms)
                    self.morphisms.append(Morphism(a, b, payload))
                    self._index[(a, b, payload)] = idx
                    ids.append(idx)
                self.hom[(a, b)] = ids
        for a in range(n + 1):
            for b in range(a):
                self.hom[(a, b)] = []
        self.source = np.array([m.source for m in self.morphisms], dtype=np.int64)
        self.target = np.array([m.target for m in self.morphisms], dtype=np.int64)
        pos = np.zeros(len(self.morphisms), dtype=np.int64)
        for ids in self.hom.values():
            for i, idx in enumerate(ids):
                pos[idx] = i
        self.position = pos
        self.identity = [self._index[(x, x, identity_payload(species, x))] for x in range(n + 1)]
        self._tables: dict[tuple[int, int, int], np.ndarray] = {}

    def __repr__(self):
        return f"FiniteCategory({self.species.label}, n={self.n}, morphisms={len(self.morphisms)})"

    @property
    def objects(self) -> range:
        return range(self.n + 1)

    @property
    def size(self) -> int:
        return len(self.morphisms)

    def index(self, m: Morphism) -> int:
        return self._index[(m.source, m.target, m.payload)]

    def lookup(self, a: int, b: int, payload: tuple) -> int:
        return self._index[(a, b, payload)]

    def is_endo(self, idx: int) -> bool:
        return self.source[idx] == self.target[idx]

    def precedes(self, a: int, b: int) -> bool:
        """The preorder: ``a <= b`` iff ``hom(a, b)`` is nonempty."""
        return bool(self.hom.get((a, b)))

    def compose(self, g: int, f: int) -> int:
        """Index of ``g o f``."""
        mf, mg = self.morphisms[f], self.morphisms[g]
        if mf.target != mg.source:
            raise ValueError(f"cannot compose {mg} after {mf}")
        t = self.table(mf.source, mf.target, mg.target)
        return self.hom[(mf.source, mg.target)][t[self.position[g], self.position[f]]]

    def table(self, a: int, b: int, c: int) -> np.ndarray:
        """``T[j, i]`` = position in ``hom(a, c)`` of ``hom(b,c)[j] o hom(a,b)[i]``."""
        key = (a, b, c)
        if key not in self._tables:
            sp = self.species
            hab, hbc = self.hom[(a, b)], self.hom[(b, c)]
            T = np.empty((len(hbc), len(hab)), dtype=np.int64)
            pos = {self.morphisms[i].payload: p for p, i in enumerate(self.hom[(a, c)])}
            fs = [self.morphisms[i].payload for i in hab]
            for j, gi in enumerate(hbc):
                g = self.morphisms[gi].payload
                for i, f in enumerate(fs):
                    T[j, i] = pos[compose_payload(sp, g, f, a, b, c)]
            self._tables[key] = T
        return self._tables[key]

    def postcompose(self, g: int, a: int) -> np.ndarray:
        """Positions in ``hom(a, target g)`` of ``g o f`` for ``f`` in ``hom(a, source g)``."""
        b, c = int(self.source[g]), int(self.target[g])
        return self.table(a, b, c)[self.position[g]]

    def precompose(self, f: int, c: int) -> np.ndarray:
        """Positions in ``hom(source f, c)`` of ``g o f`` for ``g`` in ``hom(target f, c)``."""
        a, b = int(self.source[f]), int(self.target[f])
        return self.table(a, b, c)[:, self.position[f]]

    def composable_pairs(self) -> Iterator[tuple[int, int]]:
        for (a, b), hab in self.hom.items():
            if not hab:
                continue
            for c in range(b, self.n + 1):
                for g in self.hom[(b, c)]:
                    for f in hab:
                        yield g, f

    def truncation(self, m: int) -> "FiniteCategory":
        if m > self.n:
            raise ValueError(f"cannot truncate C_{self.n} at {m}")
        return build_category(self.species, m)

    def to_json(self) -> dict:
        def enc(p):
            if isinstance(p, tuple):
                return [enc(x) for x in p]
            return p

        return {
            "species": self.species.kind,
            "params": self.species.params(),
            "n": self.n,
            "homs": [
                {"a": a, "b": b, "payloads": [enc(self.morphisms[i].payload) for i in ids]}
                for (a, b), ids in sorted(self.hom.items(), key=lambda kv: (kv[0][1], kv[0][0]))
                if ids
            ],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


_CACHE: dict[tuple, FiniteCategory] = {}


def build_category(species: Species, n: int) -> FiniteCategory:
    """Build (or fetch from cache) the truncation ``C_n``."""
    key = (species, n)
    if key not in _CACHE:
        _CACHE[key] = FiniteCategory(species, n)
    return _CACHE[key]


def compose(C: FiniteCategory, g: Morphism, f: Morphism) -> Morphism:
    if f.target != g.source:
        raise ValueError(f"non-composable pair: target {f.target} != source {g.source}")
    payload = compose_payload(C.species, g.payload, f.payload, f.source, f.target, g.target)
    return Morphism(f.source, g.target, payload)


def aut_group(C: FiniteCategory, x: int) -> FiniteGroup:
    """``Aut(x)`` with elements in hom-set order and product ``g*h = g o h``."""
    if not 0 <= x <= C.n:
        raise ValueError(f"object {x} not in C_{C.n}")
    ids = C.hom[(x, x)]
    T = C.table(x, x, x)
    table = tuple(tuple(int(T[j, i]) for i in range(len(ids))) for j in range(len(ids)))
    # T[j, i] is hom[j] o hom[i], i.e. row = left factor
    return FiniteGroup(f"Aut({x})", tuple(ids), table)


@dataclass
class SelfEmbedding:
    """``iota: C_{N-1} -> C_N`` on morphisms, as an index map."""

    source: FiniteCategory
    target: FiniteCategory
    image: list[int]

    def __call__(self, idx: int) -> int:
        return self.image[idx]


def self_embedding(C_N: FiniteCategory) -> SelfEmbedding:
    if C_N.n < 1:
        raise ValueError("self-embedding needs N >= 1")
    src = build_category(C_N.species, C_N.n - 1)
    image = []
    for m in src.morphisms:
        p = embed_payload(C_N.species, m.payload, m.source, m.target)
        image.append(C_N.lookup(m.source + 1, m.target + 1, p))
    return SelfEmbedding(src, C_N, image)
