from fractions import Fraction

import flint
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eicat.exactlinalg import (
    FieldSpec,
    Matrix,
    PreparedMatrix,
    QuotientMap,
    kernel_array,
    mat_image_basis,
    mat_kernel_basis,
    mat_rank,
    mat_rref,
    mat_solve,
    quotient_coordinates,
    rank_array,
    solve_array,
    subspace_intersection,
    subspace_sum,
)

Q = FieldSpec(0)
F2, F3, F5 = FieldSpec(2), FieldSpec(3), FieldSpec(5)


def test_field_validation():
    with pytest.raises(ValueError):
        FieldSpec(4)
    with pytest.raises(ValueError):
        FieldSpec(1)
    assert str(Q) == "Q" and str(F3) == "F_3"


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_inverses_mod_p(p):
    F = FieldSpec(p)
    for a in range(1, p):
        assert F.scalar(a * F.inv(a)) == 1


def test_rationals_lowest_terms():
    x = Q.scalar(Fraction(6, -4))
    assert isinstance(x, flint.fmpq)
    assert (x.p, x.q) == (-3, 2)
    assert F5.scalar("1/2") == 3


def test_rref_examples():
    R, piv = mat_rref(Matrix.identity(F3, 2))
    assert R == Matrix.identity(F3, 2) and piv == [0, 1]
    R, piv = mat_rref(Matrix.zeros(Q, 3, 2))
    assert R.is_zero() and piv == []
    R, piv = mat_rref(Matrix.from_rows(Q, [[2, 4], [1, 2]]))
    assert R == Matrix.from_rows(Q, [[1, 2], [0, 0]]) and piv == [0]


def test_kernel_examples():
    assert mat_kernel_basis(Matrix.identity(Q, 3)) == []
    assert len(mat_kernel_basis(Matrix.zeros(F2, 3, 3))) == 3
    assert mat_kernel_basis(Matrix.from_rows(F2, [[1, 1]])) == [(1, 1)]


def test_image_examples():
    assert len(mat_image_basis(Matrix.identity(F5, 2))) == 2
    assert mat_image_basis(Matrix.zeros(Q, 2, 2)) == []
    assert mat_image_basis(Matrix.from_rows(Q, [[1], [2]])) == [(1, 2)]


def test_solve_examples():
    assert mat_solve(Matrix.identity(Q, 2), [3, 4]) == (3, 4)
    assert mat_solve(Matrix.zeros(Q, 2, 2), [1, 0]) is None
    assert mat_solve(Matrix.from_rows(F3, [[2]]), [1]) == (2,)


def test_subspace_examples():
    u = [(1, 0)]
    assert len(subspace_intersection(Q, u, u, 2)) == 1
    assert len(subspace_sum(Q, [(1, 0)], [(1, 1)], 2)) == 2
    P = quotient_coordinates(Q, [(1, 0)], 2)
    assert not Matrix.from_columns(Q, [P.apply((0, 1))], P.rows).is_zero()
    assert all(c == 0 for c in P.apply((1, 0)))


def _matrices(fields=(0, 2, 3, 5)):
    return st.tuples(
        st.sampled_from(fields),
        st.integers(1, 6),
        st.integers(1, 6),
        st.data(),
    )


@settings(max_examples=60, deadline=None)
@given(_matrices())
def test_rank_nullity(args):
    p, m, n, data = args
    F = FieldSpec(p)
    vals = data.draw(st.lists(st.integers(-3, 3), min_size=m * n, max_size=m * n))
    a = F.array(np.array(vals).reshape(m, n).tolist())
    K = kernel_array(F, a)
    assert rank_array(F, a) + K.shape[1] == n
    if K.shape[1]:
        assert not np.any(F.matmul(a, K) != 0)


@settings(max_examples=60, deadline=None)
@given(_matrices())
def test_solve_is_consistent(args):
    p, m, n, data = args
    F = FieldSpec(p)
    vals = data.draw(st.lists(st.integers(-3, 3), min_size=m * n + m, max_size=m * n + m))
    a = F.array(np.array(vals[: m * n]).reshape(m, n).tolist())
    b = F.array(vals[m * n:])
    x = solve_array(F, a, b)
    if x is not None:
        assert not np.any(F.matmul(a, x) != b)
    else:
        assert rank_array(F, np.concatenate([a, b.reshape(-1, 1)], axis=1)) > rank_array(F, a)


@settings(max_examples=40, deadline=None)
@given(_matrices())
def test_rref_idempotent(args):
    p, m, n, data = args
    F = FieldSpec(p)
    vals = data.draw(st.lists(st.integers(-4, 4), min_size=m * n, max_size=m * n))
    M = Matrix.from_rows(F, np.array(vals).reshape(m, n).tolist())
    R, piv = mat_rref(M)
    R2, piv2 = mat_rref(R)
    assert R2 == R and piv2 == piv
    assert mat_rank(M) == len(piv)


@settings(max_examples=40, deadline=None)
@given(_matrices())
def test_quotient_map_splits(args):
    p, m, n, data = args
    F = FieldSpec(p)
    vals = data.draw(st.lists(st.integers(-2, 2), min_size=m * n, max_size=m * n))
    U = F.array(np.array(vals).reshape(m, n).tolist())
    Qm = QuotientMap(F, m, U)
    assert Qm.dim == m - rank_array(F, U)
    if Qm.dim:
        assert not np.any(F.matmul(Qm.project, Qm.lift) != F.eye(Qm.dim))
        assert not np.any(F.matmul(Qm.project, U) != 0)


@pytest.mark.parametrize("p", [0, 3])
def test_prepared_matrix_matches_matmul(p):
    F = FieldSpec(p)
    rng = np.random.default_rng(1)
    a = F.random_array(rng, (70, 80))
    b = F.random_array(rng, (80, 90))
    assert not np.any(PreparedMatrix(F, a).matmul(b) != F.matmul(a, b))
    v = b[:, 0].copy()
    assert not np.any(PreparedMatrix(F, a).matmul(v) != F.matmul(a, v))


def test_small_and_large_rational_products_agree():
    rng = np.random.default_rng(2)
    a = Q.random_array(rng, (30, 30))
    b = Q.random_array(rng, (30, 30))
    slow = np.array([[sum(a[i, k] * b[k, j] for k in range(30)) for j in range(30)] for i in range(30)], dtype=object)
    assert not np.any(Q.matmul(a, b) != slow)
    assert not np.any(Q.matmul(a[:4, :4], b[:4, :4]) != a[:4, :4].dot(b[:4, :4]))


def test_primitive_scaling():
    v = Q.array([Fraction(1, 2), Fraction(-3, 4), 0])
    w = Q.primitive(v)
    assert [int(x) for x in w] == [2, -3, 0]
    assert F3.primitive(F3.array([1, 2])).tolist() == [1, 2]
