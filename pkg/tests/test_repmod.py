import json

import numpy as np
import pytest

from eicat.catbuild import Species, build_category
from eicat.exactlinalg import FieldSpec
from eicat.repmod import (
    GroupModule,
    ModuleError,
    builtin_simples,
    cokernel,
    direct_sum,
    generating_degree,
    h0,
    h0_data,
    hom_dimension,
    identity_hom,
    induced_projective,
    kernel,
    lift,
    module_from_json,
    module_hom_space,
    random_module,
    random_short_exact,
    regular_group_module,
    representable_projective,
    restrict,
    shift,
    simple_module,
    submodule_generated,
    trivial_group_module,
    zero_module,
)
from eicat.catbuild import aut_group

Q, F2, F3 = FieldSpec(0), FieldSpec(2), FieldSpec(3)


def cat(kind, n, **kw):
    return build_category(Species.parse(kind, **kw), n)


def test_representable_examples():
    assert representable_projective(cat("oi", 2), Q, 0).dims == (1, 1, 1)
    assert representable_projective(cat("fi", 2), Q, 1).dims == (0, 1, 2)
    C = cat("fi_g", 2, group="c2")
    assert representable_projective(C, Q, 2).dims == (0, 0, 8)


def test_induced_examples():
    C = cat("fi", 2)
    G1 = aut_group(C, 1)
    assert induced_projective(C, Q, 1, trivial_group_module(G1, Q)).dims == (0, 1, 2)
    label, sign = builtin_simples(C, F3, 2)[1]
    assert induced_projective(C, F3, 2, sign).dims == (0, 0, 1)


@pytest.mark.parametrize("kind,kw", [("fi", {}), ("fi_g", {"group": "c2"}), ("vi", {"q": 2}), ("oi_d", {"d": 2})])
def test_induced_regular_is_representable(kind, kw):
    C = cat(kind, 2, **kw)
    for x in C.objects:
        W = regular_group_module(aut_group(C, x), F3)
        P = induced_projective(C, F3, x, W)
        R = representable_projective(C, F3, x)
        assert P.dims == R.dims and P.is_functorial()
        homs = module_hom_space(P, R)
        assert len(homs) == R.dims[x]


def test_h0_examples():
    C = cat("oi", 2)
    assert h0(representable_projective(C, Q, 0)).dims == (1, 0, 0)
    D = cat("fi", 2)
    for x in D.objects:
        H = h0(representable_projective(D, Q, x))
        assert H.dims == tuple(len(D.hom[(x, x)]) if y == x else 0 for y in D.objects)
    S = simple_module(D, Q, 1)
    assert h0(S).dims == S.dims


def test_generating_degree_examples():
    C = cat("fi", 2)
    assert generating_degree(zero_module(C, Q)) == -1
    assert generating_degree(representable_projective(C, Q, 1)) == 1
    V = direct_sum(representable_projective(C, Q, 0), representable_projective(C, Q, 2))
    assert generating_degree(V) == 2
    assert [x for x, d in enumerate(h0(V).dims) if d] == [0, 2]


def test_restrict_lift_shift_examples():
    C3 = cat("fi", 3)
    assert restrict(representable_projective(C3, Q, 3), 2).is_zero()
    assert restrict(representable_projective(C3, Q, 1), 2).dims == (0, 1, 2)
    S0 = simple_module(cat("oi", 1), Q, 0)
    assert lift(S0, 4).dims == (1, 0, 0, 0, 0)
    assert lift(zero_module(cat("oi", 1), Q), 3).is_zero()
    O3 = cat("oi", 3)
    assert shift(representable_projective(O3, Q, 1)).dims == (1, 2, 3)
    assert shift(representable_projective(O3, Q, 0)).dims == (1, 1, 1)
    assert shift(zero_module(O3, Q)).is_zero()
    with pytest.raises(ModuleError):
        restrict(zero_module(cat("oi", 1), Q), 2)
    with pytest.raises(ModuleError):
        lift(zero_module(O3, Q), 2)


def test_hom_space_examples():
    C = cat("oi", 2)
    assert hom_dimension(simple_module(C, Q, 0), simple_module(C, Q, 1)) == 0
    P = representable_projective(C, Q, 0)
    assert hom_dimension(P, P) == 1


def test_constructions_examples():
    C = cat("oi", 2)
    P = representable_projective(C, Q, 0)
    K, _ = kernel(identity_hom(P))
    assert K.is_zero()
    Cok, _ = cokernel(identity_hom(P))
    assert Cok.is_zero()
    U, inc = submodule_generated(P, {1: [(1,)]})
    assert U.dims == (0, 1, 1) and inc.is_natural() and U.is_functorial()


def test_simple_examples():
    C = cat("fi", 2)
    label, sign = builtin_simples(C, F3, 2)[1]
    S = simple_module(C, F3, 2, sign)
    assert S.dims == (0, 0, 1)
    G = aut_group(C, 2)
    s = next(g for g in range(2) if g != G.identity)
    assert S.action[C.hom[(2, 2)][s]][0, 0] == 2
    for x in cat("oi", 3).objects:
        assert simple_module(cat("oi", 3), Q, x).total_dim == 1
    bad = GroupModule(G, F3, 1, [F3.array([[1]]), F3.array([[0]])])
    with pytest.raises(ModuleError):
        simple_module(C, F3, 2, bad)


@pytest.mark.parametrize("kind,kw,p", [("fi", {}, 0), ("oi_g", {"group": "c2"}, 3), ("vi", {"q": 2}, 2), ("fi_d", {"d": 2}, 5)])
def test_random_modules_are_functorial(kind, kw, p):
    C = cat(kind, 2, **kw)
    F = FieldSpec(p)
    rng = np.random.default_rng(3)
    for _ in range(5):
        V = random_module(C, F, rng)
        assert V.is_functorial()
        inc, proj = random_short_exact(C, F, rng)
        assert inc.is_natural() and proj.is_natural()
        assert inc.is_injective() and proj.is_surjective()
        assert all(a + b == c for a, b, c in zip(inc.source.dims, proj.target.dims, inc.target.dims))


@pytest.mark.parametrize("p", [0, 2, 3])
def test_yoneda_dimension(p):
    C = cat("fi", 2)
    F = FieldSpec(p)
    rng = np.random.default_rng(p)
    for _ in range(3):
        V = random_module(C, F, rng)
        for x in C.objects:
            assert hom_dimension(representable_projective(C, F, x), V) == V.dims[x]


def test_h0_quotient_kills_lower_images():
    C = cat("fi", 2)
    rng = np.random.default_rng(5)
    V = random_module(C, F3, rng)
    D = h0_data(V)
    for x in C.objects:
        for y in range(x):
            for a in C.hom[(y, x)]:
                assert not np.any(F3.matmul(D.quotients[x].project, V.action[a]) != 0)


def test_json_roundtrip():
    C = cat("oi_g", 2, group="c2")
    rng = np.random.default_rng(1)
    V = random_module(C, F3, rng)
    W = module_from_json(json.loads(V.dumps()), C, F3)
    assert W.dims == V.dims
    assert all(not np.any(a != b) for a, b in zip(V.action, W.action))


@pytest.mark.parametrize("kind,kw", [("fi", {}), ("oi_g", {"group": "c2"}), ("vi", {"q": 2}), ("fi_d", {"d": 2})])
def test_shifted_representable_matches_shift(kind, kw):
    from eicat.repmod import shifted_representable
    C = cat(kind, 3, **kw)
    for x in C.objects:
        A = shift(representable_projective(C, F3, x))
        B = shifted_representable(C, F3, x)
        assert A.dims == B.dims
        assert all(not np.any(a != b) for a, b in zip(A.action, B.action))
