import json

import numpy as np
import pytest

from eicat.catbuild import Species, build_category
from eicat.exactlinalg import FieldSpec
from eicat.homres import (
    FreeResolution,
    RegimeError,
    ext_dims,
    free_resolution,
    global_dimension,
    hom_dims_from_covers,
    homological_degrees,
    is_projective,
    minimal_resolution,
    predicted_global_dimension,
    projective_cover,
    projective_dimension,
    verify_genetic_shift,
)
from eicat.repmod import (
    builtin_simples,
    direct_sum,
    generating_degree,
    lift,
    radical_quotient_module,
    random_module,
    representable_projective,
    restrict,
    simple_module,
    zero_module,
)

Q, F2, F3, F5 = FieldSpec(0), FieldSpec(2), FieldSpec(3), FieldSpec(5)


def cat(kind, n, **kw):
    return build_category(Species.parse(kind, **kw), n)


def regular(C, F):
    return direct_sum(*[representable_projective(C, F, x) for x in C.objects])


def test_free_resolution_examples():
    C = cat("oi", 2)
    res = free_resolution(regular(C, Q), 3)
    assert res.length == 0
    assert free_resolution(zero_module(C, Q), 3).ranks == []
    res = free_resolution(simple_module(cat("oi", 1), Q, 0), 3)
    assert res.ranks == [1, 1] and res.length == 1
    assert res.exactness_defects() == []


@pytest.mark.parametrize("p", [0, 2, 3])
def test_free_resolution_exact_on_random_modules(p):
    F = FieldSpec(p)
    rng = np.random.default_rng(p + 10)
    for kind, kw in [("fi", {}), ("vi", {"q": 2}), ("oi_g", {"group": "c2"})]:
        V = random_module(cat(kind, 2, **kw), F, rng)
        res = FreeResolution(V, seed=1).ensure(4)
        assert res.exactness_defects() == []


def test_ext_examples():
    C2 = cat("oi", 2)
    T = radical_quotient_module(C2, Q)
    assert ext_dims(regular(C2, Q), T, 3)[1:] == [0, 0, 0]
    S0 = simple_module(C2, Q, 0)
    assert ext_dims(S0, S0, 0) == [1]
    C1 = cat("oi", 1)
    assert ext_dims(simple_module(C1, Q, 0), simple_module(C1, Q, 1), 1)[1] == 1


def test_projective_dimension_examples():
    for F in (Q, F2, F3):
        C = cat("oi", 2)
        assert projective_dimension(simple_module(C, F, 0), 6).value == 2
        for x in C.objects:
            assert projective_dimension(representable_projective(C, F, x), 6).value == 0
    pd = projective_dimension(simple_module(cat("fi", 2), F2, 0), 6)
    assert pd.exceeds and str(pd) == "exceeds bound 6"


@pytest.mark.parametrize("kind,kw,n,p,expected", [
    ("oi", {}, 3, 0, "3"),
    ("oi", {}, 3, 2, "3"),
    ("oi", {}, 3, 3, "3"),
    ("fi", {}, 2, 3, "2"),
    ("vi", {"q": 2}, 2, 5, "2"),
    ("vi", {"q": 2}, 2, 3, "exceeds bound 6"),
])
def test_global_dimension_examples(kind, kw, n, p, expected):
    rep = global_dimension(cat(kind, n, **kw), FieldSpec(p))
    assert rep.computed_str() == expected
    assert rep.agrees


def test_predicted_values():
    assert predicted_global_dimension(Species.parse("fi"), 3, F5) == 3
    assert predicted_global_dimension(Species.parse("fi"), 3, F3) is None
    assert predicted_global_dimension(Species.parse("oi_g", "c2"), 2, F2) is None
    assert predicted_global_dimension(Species.parse("oi_d", d=2), 3, F2) == 3
    for sp in (Species.parse("fi"), Species.parse("vi", q=2), Species.parse("fi_g", "c3")):
        assert predicted_global_dimension(sp, 0, F2) == 0


def test_projective_cover_examples():
    C = cat("oi", 2)
    P = representable_projective(C, Q, 1)
    assert projective_cover(P).multiset == [(1, 1)]
    cov = projective_cover(simple_module(C, Q, 0))
    assert cov.projective.dims == (1, 1, 1) and cov.surjection.is_surjective()
    D = cat("fi", 2)
    _, sign = builtin_simples(D, F3, 2)[1]
    cov = projective_cover(simple_module(D, F3, 2, sign))
    assert cov.projective.dims == (0, 0, 1) and cov.surjection.is_natural()
    with pytest.raises(RegimeError):
        projective_cover(simple_module(D, F2, 0))


def test_minimal_resolution_examples():
    C = cat("oi", 2)
    res = minimal_resolution(simple_module(C, Q, 0))
    assert res.length == 2
    assert [t.dims for t in res.terms] == [(1, 1, 1), (0, 1, 2), (0, 0, 1)]
    assert res.betti().rows == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    assert res.exactness_defects() == []
    res = minimal_resolution(simple_module(cat("oi", 1), Q, 0))
    assert res.length == 1 and [t.dims for t in res.terms] == [(1, 1), (0, 1)]
    assert minimal_resolution(representable_projective(C, Q, 1)).length == 0
    assert minimal_resolution(simple_module(cat("oi", 3), Q, 0), max_len=1).length is None


def test_betti_csv():
    res = minimal_resolution(simple_module(cat("oi", 1), Q, 0))
    assert res.betti().to_csv() == "s,0,1\n0,1,0\n1,0,1\n"
    json.dumps(res.to_json())


def test_homological_degrees_examples():
    for n in range(4):
        assert homological_degrees(simple_module(cat("oi", n), Q, 0), n) == list(range(n + 1))
    C = cat("fi", 2)
    rng = np.random.default_rng(4)
    V = random_module(C, F5, rng)
    assert homological_degrees(V, 0)[0] == generating_degree(V)
    assert homological_degrees(representable_projective(C, F5, 1), 3)[1:] == [-1, -1, -1]


def test_degree_bound_on_lifted_modules():
    rng = np.random.default_rng(6)
    C = cat("fi_d", 2, d=2)
    for _ in range(4):
        W = random_module(C, F5, rng)
        V = lift(W, 4)
        if V.is_zero():
            continue
        top = max(V.support())
        hd = homological_degrees(V, 6)
        assert all(h <= top + s for s, h in enumerate(hd))


def test_is_projective_examples():
    C = cat("oi", 1)
    assert is_projective(representable_projective(C, Q, 0))
    assert not is_projective(simple_module(C, Q, 0))
    assert is_projective(restrict(representable_projective(cat("oi", 3), Q, 1), 2))


@pytest.mark.parametrize("p", [0, 5])
def test_free_ext_matches_minimal_terms(p):
    F = FieldSpec(p)
    C = cat("fi", 2)
    T = radical_quotient_module(C, F)
    rng = np.random.default_rng(8)
    for _ in range(4):
        V = random_module(C, F, rng)
        res = minimal_resolution(V, 4)
        from_covers = hom_dims_from_covers(res, T)
        ext = ext_dims(V, T, 4)
        assert ext[: len(from_covers)] == from_covers
        assert all(e == 0 for e in ext[len(from_covers):])


def test_genetic_shift_examples():
    rep = verify_genetic_shift(cat("oi", 3), Q, 1)
    assert rep.support == [0, 1] and list(rep.h0_dims) == [1, 1, 0] and rep.projective
    assert rep.h0_agrees and rep.ext_projective and rep.cover_dims == rep.dims
    for x in range(1, 3):
        big = verify_genetic_shift(cat("fi_g", 3, group="c2"), F5, x)
        assert big.passed and big.h0_agrees and big.ext_projective
    assert verify_genetic_shift(cat("fi", 3), F3, 1).support == [0, 1]
    assert verify_genetic_shift(cat("oi", 3), Q, 0).support == [0]
    with pytest.raises(RegimeError):
        verify_genetic_shift(cat("fi", 3), F2, 1)
