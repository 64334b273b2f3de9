import itertools

import pytest

from eicat.catbuild import (
    Morphism,
    Species,
    SpeciesError,
    aut_group,
    build_category,
    compose,
    enumerate_hom,
    self_embedding,
)

SMALL = [
    Species.parse("fi"),
    Species.parse("oi"),
    Species.parse("fi_g", "c2"),
    Species.parse("oi_g", "c3"),
    Species.parse("fi_d", d=2),
    Species.parse("oi_d", d=2),
    Species.parse("vi", q=2),
]


def test_total_counts():
    assert build_category(Species.parse("fi"), 2).size == 8
    assert build_category(Species.parse("oi"), 2).size == 7
    C = build_category(Species.parse("vi", q=2), 2)
    assert C.size == 13 and len(C.hom[(2, 2)]) == 6


def test_species_validation():
    with pytest.raises(SpeciesError):
        Species.parse("fi_g")
    with pytest.raises(SpeciesError):
        Species.parse("fi_d", d=0)
    with pytest.raises(SpeciesError):
        Species.parse("vi", q=4)
    with pytest.raises(SpeciesError):
        Species.parse("xi")


def test_fig_composition_example():
    C = build_category(Species.parse("fi_g", "c2"), 1)
    s = 1 - C.species.group.identity
    f1 = Morphism(1, 1, ((1,), (s,)))
    f2 = Morphism(1, 1, ((1,), (s,)))
    assert compose(C, f2, f1).payload == ((1,), (C.species.group.identity,))


def test_fid_composition_example():
    C = build_category(Species.parse("fi_d", d=2), 2)
    f1 = Morphism(0, 1, ((), (2,)))
    f2 = Morphism(1, 2, ((1,), (1,)))
    assert compose(C, f2, f1) == Morphism(0, 2, ((), (2, 1)))


def test_compose_rejects_mismatch():
    C = build_category(Species.parse("fi"), 2)
    with pytest.raises(ValueError):
        compose(C, Morphism(1, 2, (1,)), Morphism(0, 2, ()))


@pytest.mark.parametrize("sp", SMALL, ids=lambda s: s.label)
def test_associativity_and_units(sp):
    C = build_category(sp, 2 if sp.kind == "VI" else 3)
    for g, f in C.composable_pairs():
        assert C.compose(g, C.identity[C.source[g]]) == g
        assert C.compose(C.identity[C.target[f]], f) == f
    for a, b, c, d in itertools.combinations_with_replacement(C.objects, 4):
        for f in C.hom[(a, b)]:
            for g in C.hom[(b, c)]:
                gf = C.compose(g, f)
                for h in C.hom[(c, d)]:
                    assert C.compose(h, gf) == C.compose(C.compose(h, g), f)


@pytest.mark.parametrize("sp", SMALL, ids=lambda s: s.label)
def test_hom_counts_match_enumeration(sp):
    for a, b in itertools.combinations_with_replacement(range(4 if sp.kind != "VI" else 3), 2):
        assert len(enumerate_hom(sp, a, b)) == sp.hom_count(a, b)


@pytest.mark.parametrize("sp", SMALL, ids=lambda s: s.label)
def test_automorphism_groups(sp):
    C = build_category(sp, 2)
    for x in C.objects:
        G = aut_group(C, x).validate()
        assert G.order == sp.aut_order(x)
    assert aut_group(build_category(Species.parse("fi_g", "c2"), 2), 2).order == 8
    assert aut_group(build_category(Species.parse("oi"), 3), 3).order == 1
    assert aut_group(build_category(Species.parse("vi", q=2), 2), 2).order == 6


@pytest.mark.parametrize("sp", SMALL, ids=lambda s: s.label)
def test_automorphisms_act_freely_on_the_right(sp):
    C = build_category(sp, 2)
    for a, b in itertools.combinations_with_replacement(C.objects, 2):
        for f in C.hom[(a, b)]:
            images = {C.compose(f, g) for g in C.hom[(a, a)]}
            assert len(images) == len(C.hom[(a, a)])


@pytest.mark.parametrize("sp", SMALL, ids=lambda s: s.label)
def test_self_embedding_is_a_faithful_functor(sp):
    C = build_category(sp, 2 if sp.kind == "VI" else 3)
    iota = self_embedding(C)
    src = iota.source
    assert len(set(iota.image)) == src.size
    for x in src.objects:
        assert iota(src.identity[x]) == C.identity[x + 1]
    for g, f in src.composable_pairs():
        assert iota(src.compose(g, f)) == C.compose(iota(g), iota(f))
    for i, m in enumerate(src.morphisms):
        assert (C.source[iota(i)], C.target[iota(i)]) == (m.source + 1, m.target + 1)


def test_oi_self_embedding_example():
    C = build_category(Species.parse("oi"), 2)
    iota = self_embedding(C)
    f = iota.source.lookup(0, 1, ())
    assert C.morphisms[iota(f)] == Morphism(1, 2, (1,))


def test_json_roundtrip_shape():
    C = build_category(Species.parse("oi_d", d=2), 2)
    doc = C.to_json()
    assert doc["n"] == 2
    assert C.dumps() == build_category(Species.parse("oi_d", d=2), 2).dumps()
