import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fsbench.algebra import (CStarAlgebra, Tolerance, center_basis, cyclic_group, element_arith,
                             klein_group, operator_norm, positivity_test, symmetric_group,
                             validate_group)
from fsbench.errors import NoIdentity, NoInverse, NotAPermutationRow, NotAssociative, ShapeMismatch


def test_z2_table():
    g = validate_group([[0, 1], [1, 0]])
    assert g.order == 2 and g.identity == 0
    assert list(g.inverse) == [0, 1]


def test_klein_elements_self_inverse():
    g = klein_group()
    assert all(g.inv(x) == x for x in g)


def test_table_without_inverse():
    with pytest.raises(NoInverse) as exc:
        validate_group([[0, 1], [1, 1]])
    assert exc.value.g == 1


def test_no_identity():
    with pytest.raises(NoIdentity):
        validate_group([[0, 0], [1, 1]])


def test_latin_square_violation():
    # identity 0 and every element has an inverse, but row 1 repeats 2
    table = [[0, 1, 2], [1, 0, 2], [2, 2, 0]]
    with pytest.raises((NotAPermutationRow, NoInverse)):
        validate_group(table)


def test_non_associative_loop():
    # a Latin square with identity that is not a group (order-5 loop)
    table = [[0, 1, 2, 3, 4],
             [1, 0, 3, 4, 2],
             [2, 4, 0, 1, 3],
             [3, 2, 4, 0, 1],
             [4, 3, 1, 2, 0]]
    with pytest.raises(NotAssociative):
        validate_group(table)


def test_bad_shapes():
    with pytest.raises(ShapeMismatch):
        validate_group([[0, 1, 2], [1, 0, 2]])
    with pytest.raises(ShapeMismatch):
        validate_group([[0, 5], [1, 0]])


def test_s3_is_nonabelian():
    g = symmetric_group(3)
    assert g.order == 6
    assert any(g.mul(a, b) != g.mul(b, a) for a in g for b in g)


def test_unit_law_and_involution(rng):
    alg = CStarAlgebra((2, 1))
    a = alg.element([rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)) for n in alg.block_dims])
    assert element_arith(alg.unit(), a, "mul").allclose(a, 1e-14)
    assert element_arith(element_arith(a, kind="adjoint"), kind="adjoint").allclose(a, 0)


def test_matrix_unit_product(m2):
    e12, e21 = m2.matrix_unit(0, 0, 1), m2.matrix_unit(0, 1, 0)
    assert (e12 @ e21).allclose(m2.matrix_unit(0, 0, 0), 0)


def test_operator_norm_examples(m2, rng):
    assert operator_norm(m2.element([np.diag([3.0, -4.0])])) == pytest.approx(4.0)
    q, _ = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
    assert operator_norm(m2.element([q])) == pytest.approx(1.0)
    assert operator_norm(m2.element([np.array([[0, 1], [1, 0]])])) == pytest.approx(1.0)


def test_positivity_examples(m2):
    assert positivity_test(m2.unit()).kind == "positive"
    v = positivity_test(m2.element([np.diag([1.0, -1.0])]))
    assert (v.kind, v.block, v.value) == ("negativeEigenvalue", 0, pytest.approx(-1.0))
    assert positivity_test(m2.element([np.diag([1.0, -1e-12])]), Tolerance(1e-8, 0)).kind == "positive"
    assert positivity_test(m2.matrix_unit(0, 0, 1)).kind == "notSelfAdjoint"


def test_center_basis():
    assert len(center_basis(CStarAlgebra((2,)))) == 1
    c = center_basis(CStarAlgebra((2, 3)))
    assert [np.trace(b) for b in c[0].blocks] == [2, 0]
    assert [np.trace(b) for b in c[1].blocks] == [0, 3]
    cc = center_basis(CStarAlgebra((1, 1)))
    assert [x.vec.tolist() for x in cc] == [[1, 0], [0, 1]]


def test_tolerance_rejects_nonfinite():
    with pytest.raises(ValueError):
        Tolerance(float("nan"), 0)
    with pytest.raises(ValueError):
        Tolerance(-1, 0)


def test_vector_multiplication_matches_blocks(rng):
    alg = CStarAlgebra((1, 2))
    a = alg.element([rng.normal(size=(n, n)) for n in alg.block_dims])
    b = alg.element([rng.normal(size=(n, n)) for n in alg.block_dims])
    np.testing.assert_allclose(alg.mul_vec(a.vec, b.vec), (a @ b).vec, atol=1e-13)
    np.testing.assert_allclose(alg.lmul(a.vec) @ b.vec, (a @ b).vec, atol=1e-13)
    np.testing.assert_allclose(alg.rmul(b.vec) @ a.vec, (a @ b).vec, atol=1e-13)
    np.testing.assert_allclose(alg.adjoint_vec(a.vec), a.H.vec, atol=0)


shapes = st.sampled_from([(1,), (2,), (1, 1), (2, 1), (1, 2), (3,), (2, 2)])


@st.composite
def element_pairs(draw):
    dims = draw(shapes)
    seed = draw(st.integers(0, 2**31 - 1))
    r = np.random.default_rng(seed)
    alg = CStarAlgebra(dims)
    mk = lambda: alg.element([r.normal(size=(n, n)) + 1j * r.normal(size=(n, n)) for n in dims])
    return alg, mk(), mk()


@settings(max_examples=60, deadline=None)
@given(element_pairs())
def test_norm_submultiplicative_and_cstar_identity(pair):
    alg, a, b = pair
    assert operator_norm(a @ b) <= operator_norm(a) * operator_norm(b) * (1 + 1e-10)
    assert operator_norm(a.H @ a) == pytest.approx(operator_norm(a) ** 2, rel=1e-10)


@settings(max_examples=60, deadline=None)
@given(element_pairs())
def test_star_square_is_positive(pair):
    _, a, _ = pair
    assert positivity_test(a.H @ a).kind == "positive"


@settings(max_examples=60, deadline=None)
@given(element_pairs())
def test_center_commutes(pair):
    alg, a, _ = pair
    for z in center_basis(alg):
        assert (a @ z - z @ a).norm() <= 1e-12


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_cyclic_groups_validate(n):
    g = cyclic_group(n)
    assert g.order == n and g.identity == 0
