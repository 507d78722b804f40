import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fsbench.algebra import CStarAlgebra, cyclic_group
from fsbench.errors import (BulletFails, MiddleMismatch, NotCommutative, NotFullRight,
                            ReconstructionResidual)
from fsbench.fourier import (CoeffMap, coefficient_map, embed_algebra_element, embed_group_function,
                             exact_pd_norm, identity_map, pd_check)
from fsbench.modules import bimodule_from_functions, trivial_rep, validate_equivariant
from fsbench.morita import (Frame, amplified_pair, bullet_residuals, commutative_conjugacy,
                            conjugate_action, conjugate_bimodule, coordinate_pair,
                            equivariant_iso_residual, identity_action,
                            identity_equivalence, identity_transfer_residual, induced_rep,
                            iso_to_left_algebra, iso_to_right_algebra, iso_unit_law,
                            left_partition_of_unity, partition_of_unity, round_trip, s_coefficient,
                            span_reconstruct, swap_pair, tensor_actions, transfer,
                            transferred_coefficient_check, validate_bimodule,
                            validate_compatible_action)
from fsbench.sampling import random_coeff_maps, random_rep, random_system, random_vector
from fsbench.system import untwisted


def test_mor_pair_bimodule_and_frame(morpair):
    validate_bimodule(morpair.bimodule)
    pairs = [(z.real.tolist(), zp.real.tolist()) for z, zp in morpair.frame.pairs]
    assert pairs == [([1, 0], [1, 0]), ([0, 1], [0, 1])]
    assert morpair.frame.K == pytest.approx(4.0)
    assert morpair.frame.residual <= 1e-9


def test_mor_pair_inner_products(morpair, rng):
    z = morpair.bimodule
    x, y = random_vector(2, rng), random_vector(2, rng)
    np.testing.assert_allclose(z.linner(x, y), [x @ np.conj(y)], atol=1e-12)
    np.testing.assert_allclose(z.inner(x, y), np.outer(np.conj(x), y).reshape(-1), atol=1e-12)


def test_row_subspace_is_not_right_full():
    a, b = CStarAlgebra((1,)), CStarAlgebra((2,))
    # span of (1, 0), with the right action compressed back onto it
    sub = bimodule_from_functions(
        a, b, 1,
        left_act=lambda el, x: el.blocks[0][0, 0] * x,
        right_act=lambda x, el: x * el.blocks[0][0, 0],
        right_inner=lambda x, y: b.element([np.conj(x[0]) * y[0] * np.diag([1.0, 0.0])]),
        left_inner=lambda x, y: a.element([[[x[0] * np.conj(y[0])]]]))
    with pytest.raises(NotFullRight) as exc:
        validate_bimodule(sub)
    assert (exc.value.rank, exc.value.dim) == (1, 4)


def test_identity_equivalence(m2sys):
    data = identity_equivalence(m2sys)
    validate_bimodule(data.bimodule)
    validate_compatible_action(m2sys, m2sys, data.bimodule, data.action.delta)
    assert len(data.frame.pairs) == 1 and data.frame.K == pytest.approx(1.0)
    np.testing.assert_allclose(data.frame.pairs[0][1], m2sys.algebra.unit_vec, atol=1e-12)


def test_mor_pair_with_negated_delta(morpair):
    validate_compatible_action(morpair.sigma, morpair.theta, morpair.bimodule,
                               np.array([np.eye(2), -np.eye(2)]))


def test_non_scalar_delta_breaks_right_covariance(morpair):
    with pytest.raises(BulletFails) as exc:
        validate_compatible_action(morpair.sigma, morpair.theta, morpair.bimodule,
                                   np.array([np.eye(2), np.diag([1.0, -1.0])]))
    assert (exc.value.which, exc.value.g) == ("2", 1)


def test_identity_action_and_left_bullet(tw):
    act = identity_action(tw)
    validate_compatible_action(tw, tw, act.bimodule, act.delta)
    assert bullet_residuals(act)["residuals"]["left"] <= 1e-12


def test_conjugate_of_identity_equivalence_is_alpha(m2sys):
    act = identity_action(m2sys)
    tilde = conjugate_action(act)
    validate_compatible_action(m2sys, m2sys, tilde.bimodule, tilde.delta)
    # the vector a~ has coordinates conj(a); it corresponds to a* in A
    u = np.eye(m2sys.algebra.dim)[m2sys.algebra.adjoint_index]
    assert equivariant_iso_residual(tilde, act, u) <= 1e-12


def test_double_conjugate_is_original(morpair):
    zt, act_t = conjugate_bimodule(morpair.bimodule, morpair.action)
    ztt, act_tt = conjugate_bimodule(zt, act_t)
    z = morpair.bimodule
    for a, b in [(z.left_action, ztt.left_action), (z.right_action, ztt.right_action),
                 (z.right_inner, ztt.right_inner), (z.left_inner, ztt.left_inner),
                 (morpair.action.delta, act_tt.delta)]:
        np.testing.assert_array_equal(a, b)


def test_conjugate_preserves_norms_and_validates(morpair):
    zt, act_t = conjugate_bimodule(morpair.bimodule, morpair.action)
    validate_bimodule(zt)
    validate_compatible_action(morpair.theta, morpair.sigma, zt, act_t.delta)
    for z in np.eye(2):
        assert zt.norm(np.conj(z)) == pytest.approx(morpair.bimodule.norm(z))


def test_product_actions_match_algebras(morpair):
    for fn in (iso_unit_law, iso_to_left_algebra, iso_to_right_algebra):
        r, _ = fn(morpair.action)
        assert r <= 1e-8


def test_tensor_actions_reject_mismatched_middle(morpair):
    with pytest.raises(MiddleMismatch):
        tensor_actions(morpair.action, morpair.action)


def test_tensor_actions_associative(morpair):
    a = morpair.action
    t = conjugate_action(a)
    left, _ = tensor_actions(tensor_actions(a, t)[0], a)
    right, _ = tensor_actions(a, tensor_actions(t, a)[0])
    assert left.bimodule.dim == right.bimodule.dim == 2
    validate_compatible_action(left.left_system, left.right_system, left.bimodule, left.delta)


def test_induced_rep_on_mor_pair(morpair):
    ind = induced_rep(morpair.action, trivial_rep(morpair.sigma))
    assert ind.rep.dim == 4
    validate_equivariant(morpair.theta, ind.rep)


def test_induced_rep_across_identity_equivalence(tw, rng):
    data = identity_equivalence(tw)
    rep = random_rep(tw, np.random.default_rng(2))
    ind = induced_rep(data.action, rep)
    one = tw.algebra.unit_vec
    x, y = random_vector(rep.dim, rng), random_vector(rep.dim, rng)
    t = coefficient_map(ind.rep, ind.vector(one, x, one), ind.vector(one, y, one))
    assert t.distance(coefficient_map(rep, x, y)) <= 1e-10


def test_round_trip_recovers_coefficients(morpair, rng):
    rep = trivial_rep(morpair.sigma)
    lf = left_partition_of_unity(morpair.bimodule)
    assert lf.K == pytest.approx(1.0)
    rt = round_trip(morpair.action, rep, lf)
    x, y = random_vector(rep.dim, rng), random_vector(rep.dim, rng)
    lhs = coefficient_map(rt.rep, rt.embedding @ x, rt.embedding @ y)
    assert lhs.distance(coefficient_map(rep, x, y)) <= 1e-8


def test_s_coefficient_examples(morpair, rng):
    s = s_coefficient(morpair.action, [1, 0], [0, 1])
    for g in range(2):
        np.testing.assert_allclose(s.maps[g][:, 0], [0, 1, 0, 0])
    assert not np.any(s_coefficient(morpair.action, [1, 0], [0, 0]).maps)
    z, zeta = random_vector(2, rng), random_vector(2, rng)
    s = s_coefficient(morpair.action, z, zeta)
    a = rng.normal() + 1j * rng.normal()
    for g in range(2):
        val = morpair.theta.algebra.norm_vec(s.maps[g] @ [a])
        assert val <= s.bound * abs(a) * (1 + 1e-12)


def test_identity_transfers_to_identity(morpair):
    assert identity_transfer_residual(morpair) <= 1e-9


def test_group_functions_transfer_to_group_functions(morpair):
    f = [1.0, -0.5]
    out = transfer(morpair.action, morpair.frame, embed_group_function(morpair.sigma, f))
    assert out.distance(embed_group_function(morpair.theta, f)) <= 1e-12


def test_single_mode_matches_induced_coefficients(morpair, rng):
    rep = trivial_rep(morpair.sigma)
    ind = induced_rep(morpair.action, rep)
    for _ in range(5):
        vecs = [random_vector(2, rng) for _ in range(4)]
        x, xp = random_vector(1, rng), random_vector(1, rng)
        assert transferred_coefficient_check(morpair, rep, x, xp, *vecs, induced=ind) <= 1e-8


def test_span_reconstruct_examples(morpair):
    theta = morpair.theta
    e12 = theta.algebra.matrix_unit(0, 0, 1)
    for t in (identity_map(theta), embed_algebra_element(theta, e12), embed_group_function(theta, [2, 1j])):
        r = span_reconstruct(morpair.action, morpair.frame, t)
        assert r.residual <= 1e-12
        assert len(r.family) == 16


def test_span_reconstruct_detects_incomplete_frame(morpair):
    half = Frame(morpair.frame.pairs[:1], 1.0, 1.0)
    with pytest.raises(ReconstructionResidual):
        span_reconstruct(morpair.action, half, identity_map(morpair.theta))


def test_commutative_examples():
    phi, report = commutative_conjugacy(coordinate_pair().action)
    assert phi.perm == (0, 1) and report.ok
    phi, report = commutative_conjugacy(swap_pair().action)
    assert phi.perm == (1, 0)
    assert report.inputs["transported_twist_gap"] == 0.0
    cc = CStarAlgebra((1, 1, 1))
    phi, _ = commutative_conjugacy(identity_action(untwisted(cc, cyclic_group(3))))
    assert phi.perm == (0, 1, 2)


def test_commutative_rejects_matrix_algebra(morpair):
    with pytest.raises(NotCommutative):
        commutative_conjugacy(morpair.action)


@pytest.mark.parametrize("seed", range(4))
def test_amplified_pairs(seed):
    s = random_system(np.random.default_rng(seed))
    data = amplified_pair(s, 2)
    assert identity_transfer_residual(data) <= 1e-9
    assert data.frame.residual <= 1e-9 and data.frame.K >= 1.0 - 1e-9
    r, _ = iso_to_right_algebra(data.action)
    assert r <= 1e-8


@st.composite
def pd_inputs(draw):
    rng = np.random.default_rng(draw(st.integers(0, 2**32 - 1)))
    return rng


@settings(max_examples=15, deadline=None)
@given(pd_inputs())
def test_transfer_preserves_positivity_and_bound(rng):
    data = amplified_pair(random_system(rng), 2)
    rep = random_rep(data.sigma, rng)
    x = random_vector(rep.dim, rng)
    t = coefficient_map(rep, x, x)
    ft = transfer(data.action, data.frame, t)
    assert pd_check(data.theta, ft).positive
    assert exact_pd_norm(ft) <= data.frame.K * exact_pd_norm(t) * (1 + 1e-9) + 1e-12


@settings(max_examples=15, deadline=None)
@given(pd_inputs())
def test_single_transfer_is_linear(rng):
    data = amplified_pair(random_system(rng), 2)
    n = data.bimodule.dim
    vecs = tuple(random_vector(n, rng) for _ in range(4))
    t1 = CoeffMap(data.sigma, random_coeff_maps(data.sigma, rng))
    t2 = CoeffMap(data.sigma, random_coeff_maps(data.sigma, rng))
    lam = rng.normal() + 1j * rng.normal()
    lhs = transfer(data.action, None, t1 + lam * t2, "single", vecs)
    rhs = transfer(data.action, None, t1, "single", vecs) + lam * transfer(data.action, None, t2, "single", vecs)
    assert lhs.distance(rhs) <= 1e-9 * max(1.0, np.max(np.abs(lhs.maps)))


@settings(max_examples=15, deadline=None)
@given(pd_inputs())
def test_left_bullet_holds_automatically(rng):
    data = amplified_pair(random_system(rng), 2)
    validate_compatible_action(data.sigma, data.theta, data.bimodule, data.action.delta, include_left=False)
    assert bullet_residuals(data.action)["residuals"]["left"] <= 1e-9
