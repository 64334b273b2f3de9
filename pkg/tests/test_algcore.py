import itertools

import numpy as np
import pytest

from eicat.algcore import (
    category_algebra,
    group_algebra,
    ideal_product,
    invertibility_criterion,
    is_two_sided_ideal,
    maschke_predicts_semisimple,
    nilpotency_index,
    quotient_algebra,
    radical_basis,
    radical_category_algebra,
    radical_group_algebra,
)
from eicat.catbuild import Species, build_category
from eicat.exactlinalg import FieldSpec, rank_array
from eicat.groups import builtin_group

CHARS = [0, 2, 3, 5]


def brute_radical_dim(G, p):
    """Size of {a : b*a nilpotent for every b}, by enumerating all of F_p G."""
    n = G.order
    t = np.array(G.table)
    vecs = np.array(list(itertools.product(range(p), repeat=n)), dtype=np.int64)

    def left(u):
        # L_u[g*h, h] += u[g]
        L = np.zeros(u.shape[:-1] + (n, n), dtype=np.int64)
        for g in range(n):
            for h in range(n):
                L[..., t[g][h], h] += u[..., g]
        return L % p

    count = 0
    for a in vecs:
        # b*a = L_b a, for every b at once
        prods = np.einsum("bij,j->bi", left(vecs), a) % p
        P = left(prods)
        M = P
        for _ in range(n - 1):
            M = np.einsum("bij,bjk->bik", M, P) % p
        if not M.any():
            count += 1
    return round(np.log(count) / np.log(p))


@pytest.mark.parametrize("name,p", [("c2", 2), ("c2", 3), ("c3", 3), ("c3", 2), ("klein", 2), ("c4", 2), ("s3", 2), ("s3", 3)])
def test_group_radical_matches_brute_force(name, p):
    G = builtin_group(name)
    A = group_algebra(G, FieldSpec(p))
    assert radical_group_algebra(A).shape[1] == brute_radical_dim(G, p)


def test_group_radical_examples():
    S2 = builtin_group("c2")
    assert radical_group_algebra(group_algebra(S2, FieldSpec(3))).shape[1] == 0
    J = radical_group_algebra(group_algebra(S2, FieldSpec(2)))
    assert J.shape[1] == 1 and J[:, 0].tolist() == [1, 1]
    assert radical_group_algebra(group_algebra(builtin_group("s3"), FieldSpec(3))).shape[1] == 4


@pytest.mark.parametrize("name", ["c1", "c2", "c3", "c4", "c5", "c6", "s3", "klein"])
@pytest.mark.parametrize("p", CHARS)
def test_maschke_coincidence(name, p):
    G, F = builtin_group(name), FieldSpec(p)
    A = group_algebra(G, F)
    assert (radical_basis(A).shape[1] == 0) == maschke_predicts_semisimple(G, F)
    assert (radical_group_algebra(A).shape[1] == 0) == maschke_predicts_semisimple(G, F)


@pytest.mark.parametrize("name,p", [("s3", 2), ("s3", 3), ("klein", 2), ("c6", 3), ("c4", 2)])
def test_radical_nilpotent_with_semisimple_quotient(name, p):
    F = FieldSpec(p)
    A = group_algebra(builtin_group(name), F)
    J = radical_group_algebra(A)
    assert is_two_sided_ideal(A, J)
    assert nilpotency_index(A, J) is not None
    B, _ = quotient_algebra(A, J)
    assert radical_basis(B).shape[1] == 0


@pytest.mark.parametrize("p", CHARS)
def test_category_algebra_is_associative_with_unit(p):
    A = category_algebra(build_category(Species.parse("fi_g", "c2"), 2), FieldSpec(p))
    assert A.is_associative()
    rng = np.random.default_rng(0)
    u = A.field.random_array(rng, A.dim)
    assert not np.any(A.mul(A.unit, u) != u) and not np.any(A.mul(u, A.unit) != u)


def test_category_radical_examples():
    for p in CHARS:
        A = category_algebra(build_category(Species.parse("oi"), 2), FieldSpec(p))
        assert radical_category_algebra(A).dim == 4
    FI2 = build_category(Species.parse("fi"), 2)
    assert radical_category_algebra(category_algebra(FI2, FieldSpec(3))).dim == 4
    assert radical_category_algebra(category_algebra(FI2, FieldSpec(2))).dim == 5


@pytest.mark.parametrize("sp,n,p", [
    (Species.parse("fi"), 2, 2),
    (Species.parse("fi"), 2, 0),
    (Species.parse("oi_g", "c2"), 2, 2),
    (Species.parse("fi_d", d=2), 2, 3),
    (Species.parse("vi", q=2), 2, 3),
])
def test_category_radical_agrees_with_generic_radical(sp, n, p):
    F = FieldSpec(p)
    A = category_algebra(build_category(sp, n), F)
    rad = radical_category_algebra(A)
    J = rad.basis()
    assert rank_array(F, J) == rad.dim == radical_basis(A).shape[1]
    assert rank_array(F, np.concatenate([J, radical_basis(A)], axis=1)) == rad.dim
    assert is_two_sided_ideal(A, J)
    assert nilpotency_index(A, J) is not None
    B, _ = quotient_algebra(A, J)
    assert radical_basis(B).shape[1] == 0


def test_ideal_product_of_non_endomorphisms():
    F = FieldSpec(0)
    C = build_category(Species.parse("oi"), 2)
    A = category_algebra(C, F)
    J = radical_category_algebra(A).basis()
    # J^2 is spanned by composites 0 -> 1 -> 2
    assert ideal_product(A, J, J).shape[1] == 1
    assert nilpotency_index(A, J) == 3


def test_invertibility_examples():
    assert not invertibility_criterion(build_category(Species.parse("fi"), 2), FieldSpec(2)).holds
    assert invertibility_criterion(build_category(Species.parse("oi_g", "c2"), 2), FieldSpec(3)).holds
    rep = invertibility_criterion(build_category(Species.parse("vi", q=2), 2), FieldSpec(5))
    assert rep.holds
    assert [r["aut_order"] for r in rep.to_json()["objects"]] == [1, 1, 6]


def test_nilpotency_index_small_cases():
    F = FieldSpec(2)
    A = group_algebra(builtin_group("c2"), F)
    assert nilpotency_index(A, radical_group_algebra(A)) == 2
    assert nilpotency_index(A, F.zeros((2, 0))) == 0
    assert nilpotency_index(A, F.eye(2)) is None
