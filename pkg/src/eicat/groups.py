"""Finite groups given by multiplication tables, plus their linear characters."""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Sequence

from .exactlinalg import FieldSpec


class GroupTableError(ValueError):
    pass


@dataclass(frozen=True)
class FiniteGroup:
    """Elements ``0..order-1`` with ``table[i][j]`` the index of ``i*j``."""

    name: str
    labels: tuple
    table: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n = len(self.labels)
        if len(self.table) != n or any(len(row) != n for row in self.table):
            raise GroupTableError(f"{self.name}: table is not {n}x{n}")
        for row in self.table:
            for x in row:
                if not 0 <= x < n:
                    raise GroupTableError(f"{self.name}: entry {x} out of range")
        e = self.identity  # raises if missing
        for i in range(n):
            if sorted(self.table[i]) != list(range(n)):
                raise GroupTableError(f"{self.name}: row {i} is not a permutation")
            if e not in self.table[i]:
                raise GroupTableError(f"{self.name}: element {i} has no inverse")

    def validate(self) -> "FiniteGroup":
        """Exhaustive associativity check; cheap checks already ran at construction."""
        n = self.order
        t = self.table
        for a, b, c in itertools.product(range(n), repeat=3):
            if t[t[a][b]][c] != t[a][t[b][c]]:
                raise GroupTableError(f"{self.name}: not associative at {(a, b, c)}")
        return self

    @property
    def order(self) -> int:
        return len(self.labels)

    @cached_property
    def identity(self) -> int:
        for e in range(len(self.labels)):
            if all(self.table[e][x] == x and self.table[x][e] == x for x in range(len(self.labels))):
                return e
        raise GroupTableError(f"{self.name}: no identity element")

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    @cached_property
    def inverses(self) -> tuple[int, ...]:
        return tuple(row.index(self.identity) for row in self.table)

    def inv(self, a: int) -> int:
        return self.inverses[a]

    def element_order(self, a: int) -> int:
        e, x, k = self.identity, a, 1
        while x != e:
            x = self.table[x][a]
            k += 1
        return k

    def generators(self) -> list[int]:
        """A small generating set, chosen greedily in element order."""
        gens: list[int] = []
        span = {self.identity}
        for g in range(self.order):
            if g in span:
                continue
            gens.append(g)
            span = self._closure(gens)
            if len(span) == self.order:
                break
        return gens

    def _closure(self, gens: Sequence[int]) -> set[int]:
        seen = {self.identity}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for h in frontier:
                for s in gens:
                    x = self.table[h][s]
                    if x not in seen:
                        seen.add(x)
                        nxt.append(x)
            frontier = nxt
        return seen

    def to_json(self) -> dict:
        return {"name": self.name, "labels": [str(x) for x in self.labels], "table": [list(r) for r in self.table]}


def cyclic(k: int) -> FiniteGroup:
    if k < 1:
        raise GroupTableError("cyclic group order must be positive")
    return FiniteGroup(f"c{k}", tuple(range(k)), tuple(tuple((i + j) % k for j in range(k)) for i in range(k)))


def _perm_group(name: str, perms: list[tuple[int, ...]]) -> FiniteGroup:
    index = {p: i for i, p in enumerate(perms)}
    # (p*q)(x) = p(q(x)): composition, matching how automorphisms compose
    table = tuple(tuple(index[tuple(p[q[x]] for x in range(len(q)))] for q in perms) for p in perms)
    return FiniteGroup(name, tuple(perms), table)


def symmetric3() -> FiniteGroup:
    return _perm_group("s3", sorted(itertools.permutations(range(3))))


def klein() -> FiniteGroup:
    els = [(0, 0), (0, 1), (1, 0), (1, 1)]
    idx = {e: i for i, e in enumerate(els)}
    table = tuple(tuple(idx[((a[0] + b[0]) % 2, (a[1] + b[1]) % 2)] for b in els) for a in els)
    return FiniteGroup("klein", tuple(els), table)


BUILTIN_GROUPS = ("c1", "c2", "c3", "c4", "c5", "c6", "s3", "klein")


def builtin_group(name: str) -> FiniteGroup:
    name = name.lower()
    if name in ("s3", "sym3"):
        return symmetric3()
    if name in ("klein", "v4"):
        return klein()
    if name.startswith("c") and name[1:].isdigit() and 1 <= int(name[1:]) <= 6:
        return cyclic(int(name[1:]))
    raise GroupTableError(f"unknown built-in group {name!r}; choose from {', '.join(BUILTIN_GROUPS)}")


def group_from_json(path: str | Path) -> FiniteGroup:
    data = json.loads(Path(path).read_text())
    table = tuple(tuple(int(x) for x in row) for row in data["table"])
    labels = tuple(data.get("labels", range(len(table))))
    return FiniteGroup(data.get("name", Path(path).stem), labels, table).validate()


def roots_of_unity(field: FieldSpec, order: int) -> list:
    """All ``z`` in the field with ``z**order == 1``."""
    if field.characteristic == 0:
        return [field.scalar(1)] + ([field.scalar(-1)] if order % 2 == 0 else [])
    p = field.p
    return [z for z in range(1, p) if pow(z, order, p) == 1]


def linear_characters(G: FiniteGroup, field: FieldSpec) -> list[tuple]:
    """Every homomorphism ``G -> k^*``, as value tuples; the trivial one first."""
    gens = G.generators()
    choices = [roots_of_unity(field, G.element_order(s)) for s in gens]
    one = field.one()
    found = []
    for images in itertools.product(*choices):
        val = {G.identity: one}
        frontier = [G.identity]
        ok = True
        while frontier and ok:
            nxt = []
            for h in frontier:
                for s, z in zip(gens, images):
                    x = G.table[h][s]
                    v = field.scalar(val[h] * z)
                    if x in val:
                        if val[x] != v:
                            ok = False
                            break
                    else:
                        val[x] = v
                        nxt.append(x)
                if not ok:
                    break
            frontier = nxt
        if not ok or len(val) != G.order:
            continue
        chi = tuple(val[g] for g in range(G.order))
        if all(chi[G.table[a][b]] == field.scalar(chi[a] * chi[b]) for a in range(G.order) for b in range(G.order)):
            found.append(chi)
    found.sort(key=lambda c: (any(x != one for x in c), [int(x) if field.characteristic else (0 if x == 1 else 1) for x in c]))
    return found
