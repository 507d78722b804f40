import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fsbench.algebra import CStarAlgebra, cyclic_group, klein_group
from fsbench.errors import (AutomorphismTwistMismatch, CocycleIdentityFails, NotCentral,
                            NotConjugate, NotIsomorphism, NotNormalized, NotUnitaryCocycle,
                            NotUnitModulus, ShapeMismatch)
from fsbench.gallery import sys_tw
from fsbench.sampling import random_algebra_unitary, random_system, random_unitary_map
from fsbench.system import (CentralCocycle, Isomorphism, TwistedSystem, UnitaryMap,
                            certify_group_conjugacy, coboundary, group_transport,
                            is_one_cocycle, perturb_central, perturb_unitary, system_distance,
                            untwisted, validate_central_cocycle, validate_scalar_cocycle,
                            validate_system)

C = CStarAlgebra((1,))


def klein_omega():
    return np.array([[(-1.0) ** ((g % 2) * (h // 2)) for h in range(4)] for g in range(4)])


def with_sigma(system, g, h, value):
    sigma = [list(r) for r in system.sigma]
    sigma[g][h] = value
    return TwistedSystem(system.algebra, system.group, system.alpha, sigma)


def test_trivial_system_valid(triv):
    assert validate_system(triv) is triv


def test_klein_cocycle_system_valid(tw):
    np.testing.assert_array_equal(tw.sigma_vecs[:, :, 0].real, klein_omega())


def test_negated_klein_entry_located(tw):
    # hand check: omega(1,1) omega(0,2) = 1 while omega'(1,2) omega(1,3) = -1
    bad = with_sigma(tw, 1, 2, -tw.sigma[1][2])
    with pytest.raises(CocycleIdentityFails) as exc:
        validate_system(bad)
    assert exc.value.triple == (1, 1, 2)
    assert exc.value.residual == pytest.approx(2.0)


def test_non_unitary_cocycle_entry(triv):
    with pytest.raises(NotUnitaryCocycle) as exc:
        validate_system(with_sigma(triv, 1, 1, C.scalar(2.0)))
    assert exc.value.pair == (1, 1)


def test_unnormalized_cocycle(triv):
    with pytest.raises(NotNormalized):
        validate_system(with_sigma(triv, 1, 0, C.scalar(-1.0)))


def test_twist_mismatch(m2sys):
    # alpha_s = Ad(diag(1,-1)) squares to the identity, so sigma(s,s) must be central
    u = m2sys.algebra.element([np.array([[0, 1], [1, 0]], dtype=complex)])
    with pytest.raises(AutomorphismTwistMismatch) as exc:
        validate_system(with_sigma(m2sys, 1, 1, u))
    assert exc.value.pair == (1, 1)


def test_shape_checks(z2):
    with pytest.raises(ShapeMismatch):
        TwistedSystem(C, z2, [Isomorphism.identity(C)], [[C.unit()] * 2] * 2)
    with pytest.raises(ShapeMismatch):
        TwistedSystem(C, z2, [Isomorphism.identity(C)] * 2, [[C.unit()] * 3] * 2)


def test_identity_perturbation(m2sys):
    w = UnitaryMap((m2sys.algebra.unit(),) * 2)
    assert system_distance(perturb_unitary(m2sys, w), m2sys) == 0.0


def test_m2_perturbation_untwists(m2sys):
    alg = m2sys.algebra
    w = UnitaryMap((alg.unit(), alg.element([np.diag([1.0, -1.0])])))
    sw = perturb_unitary(m2sys, w)
    assert system_distance(sw, untwisted(alg, m2sys.group)) <= 1e-15


def test_unnormalized_perturbation(triv):
    with pytest.raises(NotNormalized):
        perturb_unitary(triv, UnitaryMap((C.scalar(1j), C.unit())))


def test_perturb_back_by_adjoint():
    rng = np.random.default_rng(5)
    for _ in range(5):
        s = random_system(rng)
        w = random_unitary_map(s, rng)
        back = perturb_unitary(perturb_unitary(s, w), w.adjoint())
        assert system_distance(back, s) <= 1e-12


def test_central_perturbation_examples(z2):
    triv4 = untwisted(C, klein_group())
    assert system_distance(perturb_central(triv4, CentralCocycle(((C.unit(),) * 4,) * 4)), triv4) == 0
    assert system_distance(perturb_central(triv4, validate_scalar_cocycle(klein_group(), klein_omega())),
                           sys_tw()) == 0
    cc = CStarAlgebra((1, 1))
    base = untwisted(cc, z2)
    one, d = cc.unit(), cc.element([np.eye(1), -np.eye(1)])
    s = perturb_central(base, CentralCocycle(((one, one), (one, d))))
    assert np.allclose(s.sigma[1][1].vec, [1, -1])


def test_central_cocycle_must_be_central(m2sys):
    alg = m2sys.algebra
    one = alg.unit()
    u = alg.element([np.diag([1.0, -1.0])])
    with pytest.raises(NotCentral):
        validate_central_cocycle(m2sys, CentralCocycle(((one, one), (one, u))))


def test_coboundary_examples(triv):
    du = coboundary(triv, UnitaryMap((C.unit(), C.scalar(1j))))
    assert du[1][1].vec[0] == pytest.approx(-1.0)
    for g in range(2):
        assert du[0][g].allclose(C.unit(), 0) and du[g][0].allclose(C.unit(), 0)
    # a character is a one-cocycle for the trivial action
    chi = UnitaryMap((C.unit(), C.scalar(-1.0)))
    assert is_one_cocycle(triv, chi)
    assert all(x.allclose(C.unit(), 1e-15) for row in coboundary(triv, chi) for x in row)


def test_scalar_cocycle_examples():
    g4 = klein_group()
    validate_scalar_cocycle(g4, np.ones((4, 4)))
    validate_scalar_cocycle(g4, klein_omega())
    validate_scalar_cocycle(cyclic_group(2), [[1, 1], [1, 1j]])
    with pytest.raises(NotUnitModulus):
        validate_scalar_cocycle(cyclic_group(2), [[1, 1], [1, 2]])
    bad = klein_omega()
    bad[1, 2] *= -1
    with pytest.raises(CocycleIdentityFails):
        validate_scalar_cocycle(g4, bad)


def test_group_transport_identity(tw):
    assert system_distance(group_transport(tw, Isomorphism.identity(C), [0, 1, 2, 3]), tw) == 0


def test_group_transport_swap_factors(tw):
    swap = [0, 2, 1, 3]  # (a,b) -> (b,a) with index 2a+b
    out = group_transport(tw, Isomorphism.identity(C), swap)
    # transported cocycle is (-1)^(ad)
    expect = np.array([[(-1.0) ** ((g // 2) * (h % 2)) for h in range(4)] for g in range(4)])
    np.testing.assert_allclose(out.sigma_vecs[:, :, 0], expect)
    certify_group_conjugacy(tw, out, Isomorphism.identity(C), swap)
    with pytest.raises(NotConjugate) as exc:
        certify_group_conjugacy(tw, out, Isomorphism.identity(C), [0, 1, 2, 3])
    assert exc.value.which == "ii"


def test_group_transport_inner(m2sys):
    rng = np.random.default_rng(1)
    u = random_algebra_unitary(m2sys.algebra, rng)
    phi = Isomorphism.inner(m2sys.algebra, u)
    out = group_transport(m2sys, phi, [0, 1])
    certify_group_conjugacy(m2sys, out, phi, [0, 1])


def test_group_transport_rejects_non_homomorphism(tw):
    with pytest.raises(NotIsomorphism):
        group_transport(tw, Isomorphism.identity(C), [0, 1, 1, 3])
    with pytest.raises(NotIsomorphism):
        group_transport(untwisted(C, cyclic_group(3)), Isomorphism.identity(C), [0, 2, 1][::-1])


def test_isomorphism_algebra(rng):
    alg = CStarAlgebra((2, 1, 2))
    a = alg.element([rng.normal(size=(n, n)) for n in alg.block_dims])
    b = alg.element([rng.normal(size=(n, n)) for n in alg.block_dims])
    phi = Isomorphism(alg, alg, (2, 1, 0), random_algebra_unitary(alg, rng))
    psi = Isomorphism.inner(alg, random_algebra_unitary(alg, rng))
    assert phi(a @ b).allclose(phi(a) @ phi(b), 1e-12)
    assert phi(a.H).allclose(phi(a).H, 1e-12)
    assert phi.compose(psi)(a).allclose(phi(psi(a)), 1e-12)
    assert phi.inverse()(phi(a)).allclose(a, 1e-12)
    np.testing.assert_allclose(phi.matrix @ a.vec, phi(a).vec, atol=1e-12)
    with pytest.raises(NotIsomorphism):
        Isomorphism(alg, alg, (1, 0, 2), alg.unit())


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_random_systems_and_perturbations_validate(seed):
    rng = np.random.default_rng(seed)
    s = random_system(rng)
    validate_system(s)
    w = random_unitary_map(s, rng)
    sw = perturb_unitary(s, w)
    for g in s.group:
        for h in s.group:
            expect = w[g] @ s.alpha[g](w[h]) @ s.sigma[g][h] @ w[s.group.mul(g, h)].H
            assert sw.sigma[g][h].allclose(expect, 1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_central_perturbation_is_coboundary(seed):
    rng = np.random.default_rng(seed)
    s = random_system(rng)
    u = random_unitary_map(s, rng, central=True)
    du = CentralCocycle(tuple(tuple(r) for r in coboundary(s, u)))
    assert system_distance(perturb_unitary(s, u), perturb_central(s, du)) <= 1e-10
