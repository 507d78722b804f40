"""Acceptance criteria 1 to 9; a per-criterion PASS/FAIL line is printed in the terminal summary."""
import numpy as np
import pytest

from fsbench.algebra import Tolerance
from fsbench.amenability import (AmenabilityWitness, constant_exel_function, exel_coefficient,
                                 transfer_witness, validate_witness)
from fsbench.errors import CheckFailed
from fsbench.fourier import (CoeffMap, coefficient_map, confirm_certificate, embed_algebra_element,
                             embed_group_function, exact_pd_norm, identity_map, pd_check,
                             pd_check_sampled)
from fsbench.gallery import GALLERY_NAMES, build, sys_m2, sys_triv, sys_tw
from fsbench.modules import perturbed_rep, validate_equivariant
from fsbench.morita import (commutative_conjugacy, coordinate_pair, identity_transfer_residual,
                            induced_rep, iso_to_left_algebra, iso_to_right_algebra, mor_pair,
                            span_reconstruct, swap_pair, transferred_coefficient_check)
from fsbench.sampling import (mutate_system, random_coeff_maps, random_rep, random_system,
                              random_unitary_map, random_vector)
from fsbench.system import (CentralCocycle, coboundary, perturb_central, perturb_unitary,
                            system_distance, validate_system)
from fsbench.transport import check_pi_homomorphism, pi_transport

# "exact" comparisons are taken at machine precision: products such as w w* or
# (1/sqrt 2)^2 * 2 are off from the identity by a few ulp
EXACT = 1e-12


def _reps_and_vectors(system, rng):
    rep = random_rep(system, rng)
    return rep, random_vector(rep.dim, rng), random_vector(rep.dim, rng)


# -- 1 -------------------------------------------------------------------------

C1 = pytest.mark.criterion(1, "axiom suite")


@C1
def test_gallery_systems_validate():
    for name in GALLERY_NAMES:
        for s in build(name).systems.values():
            validate_system(s)
    for s in (sys_triv(), sys_tw(), sys_m2()):
        validate_system(s)


@C1
def test_single_entry_mutations_detected():
    rng = np.random.default_rng(101)
    kinds = set()
    for _ in range(50):
        s = random_system(rng, min_order=3)
        bad, where = mutate_system(s, rng)
        kinds.add(where.split("[")[0])
        with pytest.raises(CheckFailed):
            validate_system(bad, Tolerance(1e-8, 0.0))
    assert kinds == {"sigma", "alpha"}


# -- 2 -------------------------------------------------------------------------

C2 = pytest.mark.criterion(2, "perturbation suite")


@C2
def test_random_perturbations_validate():
    rng = np.random.default_rng(202)
    for _ in range(20):
        s = random_system(rng)
        validate_system(perturb_unitary(s, random_unitary_map(s, rng)))


@C2
def test_central_perturbation_equals_coboundary_twist():
    rng = np.random.default_rng(203)
    for _ in range(20):
        s = random_system(rng)
        u = random_unitary_map(s, rng, central=True)
        du = CentralCocycle(tuple(tuple(row) for row in coboundary(s, u)))
        assert system_distance(perturb_unitary(s, u), perturb_central(s, du)) <= 1e-10


# -- 3 -------------------------------------------------------------------------

@pytest.mark.criterion(3, "perturbed-representation suite")
def test_perturbed_representations():
    rng = np.random.default_rng(303)
    for _ in range(20):
        s = random_system(rng)
        w = random_unitary_map(s, rng)
        rep, x, y = _reps_and_vectors(s, rng)
        prep = perturbed_rep(s, w, rep)
        validate_equivariant(prep.system, prep)
        t = pi_transport(s, w, coefficient_map(rep, x, y))
        tt = coefficient_map(prep, x, y)
        assert np.max(np.abs(t.maps - tt.maps)) <= 1e-10


# -- 4 -------------------------------------------------------------------------

C4 = pytest.mark.criterion(4, "transport suite")


@C4
def test_pi_fixes_group_functions_and_algebra_elements():
    rng = np.random.default_rng(404)
    for _ in range(10):
        s = random_system(rng)
        w = random_unitary_map(s, rng)
        sw = perturb_unitary(s, w)
        f = rng.normal(size=s.order) + 1j * rng.normal(size=s.order)
        assert pi_transport(s, w, embed_group_function(s, f), sw).distance(embed_group_function(sw, f)) <= EXACT
        b = s.algebra.from_vec(random_vector(s.algebra.dim, rng))
        assert pi_transport(s, w, embed_algebra_element(s, b), sw).distance(
            embed_algebra_element(sw, b)) <= EXACT


@C4
def test_pi_multiplicative():
    rng = np.random.default_rng(405)
    s = random_system(rng)
    w = random_unitary_map(s, rng)
    pairs = [(CoeffMap(s, random_coeff_maps(s, rng)), CoeffMap(s, random_coeff_maps(s, rng)))
             for _ in range(20)]
    report = check_pi_homomorphism(s, w, pairs, 1e-10)
    assert report.ok and len(report.checks_passed) == 20


@C4
def test_pi_preserves_verdicts_and_exact_norms():
    rng = np.random.default_rng(406)
    for _ in range(20):
        s = random_system(rng)
        w = random_unitary_map(s, rng)
        sw = perturb_unitary(s, w)
        rep, x, _ = _reps_and_vectors(s, rng)
        t = coefficient_map(rep, x, x)
        pt = pi_transport(s, w, t, sw)
        assert pd_check(s, t).positive and pd_check(sw, pt).positive
        assert abs(exact_pd_norm(pt) - exact_pd_norm(t)) <= 1e-10 * max(1.0, exact_pd_norm(t))
        r = CoeffMap(s, random_coeff_maps(s, rng))
        assert pd_check(s, r).positive == pd_check(sw, pi_transport(s, w, r, sw)).positive


# -- 5 -------------------------------------------------------------------------

C5 = pytest.mark.criterion(5, "positive-definiteness suite")


@C5
def test_diagonal_coefficients_are_pd_with_exact_norm():
    rng = np.random.default_rng(505)
    for _ in range(50):
        s = random_system(rng)
        rep, x, _ = _reps_and_vectors(s, rng)
        t = coefficient_map(rep, x, x)
        assert pd_check(s, t).positive
        expected = s.algebra.from_vec(rep.module.inner(x, x)).norm()
        assert abs(exact_pd_norm(t) - expected) <= 1e-8 * max(1.0, expected)


@C5
def test_scalar_examples():
    s = sys_triv()
    assert pd_check(s, embed_group_function(s, [1.0, -1.0])).positive
    v = pd_check(s, embed_group_function(s, [1.0, 2.0]))
    assert not v.positive and v.min_eigenvalue == pytest.approx(-1.0)


@C5
def test_sampled_checker_never_falsifies_choi():
    checked = {"positive": 0, "notPD": 0}
    for seed in range(500):
        rng = np.random.default_rng(10_000 + seed)
        s = random_system(rng, perturb=bool(seed % 2))
        kind = seed % 3
        if kind == 0:
            rep, x, _ = _reps_and_vectors(s, rng)
            t = coefficient_map(rep, x, x)
        elif kind == 1:
            rep, x, _ = _reps_and_vectors(s, rng)
            base = coefficient_map(rep, x, x)
            t = base - (rng.random() * exact_pd_norm(base)) * identity_map(s)
        else:
            t = CoeffMap(s, random_coeff_maps(s, rng))
        v = pd_check(s, t)
        if v.positive:
            assert pd_check_sampled(s, t, samples=8, seed=seed).positive
            checked["positive"] += 1
        else:
            assert confirm_certificate(s, t, v) < 0
            checked["notPD"] += 1
    assert min(checked.values()) > 50


# -- 6 -------------------------------------------------------------------------

C6 = pytest.mark.criterion(6, "Morita suite")


@C6
def test_mor_pair_frame_and_identity():
    data = mor_pair()
    assert data.frame.residual <= 1e-9
    assert data.frame.K == pytest.approx(4.0, abs=1e-9)
    assert identity_transfer_residual(data) <= 1e-9


@C6
def test_single_mode_matches_induced_representation():
    data = mor_pair()
    rng = np.random.default_rng(606)
    for _ in range(20):
        rep = random_rep(data.sigma, rng)
        x, xp = random_vector(rep.dim, rng), random_vector(rep.dim, rng)
        vecs = [random_vector(data.bimodule.dim, rng) for _ in range(4)]
        ind = induced_rep(data.action, rep)
        assert transferred_coefficient_check(data, rep, x, xp, *vecs, induced=ind) <= 1e-8


@C6
def test_span_reconstruct_random_targets():
    data = mor_pair()
    rng = np.random.default_rng(607)
    for _ in range(10):
        t = CoeffMap(data.theta, random_coeff_maps(data.theta, rng))
        r = span_reconstruct(data.action, data.frame, t, 1e-8)
        assert r.residual <= 1e-8


@C6
def test_product_actions_recover_system_actions():
    data = mor_pair()
    assert iso_to_left_algebra(data.action)[0] <= 1e-8
    assert iso_to_right_algebra(data.action)[0] <= 1e-8


# -- 7 -------------------------------------------------------------------------

@pytest.mark.criterion(7, "commutative suite")
def test_commutative_conjugacy_intertwines():
    for data in (coordinate_pair(), swap_pair()):
        _, report = commutative_conjugacy(data.action)
        assert report.ok
        residual = dict(report.checks_passed)["intertwining"]
        assert residual <= 1e-10


# -- 8 -------------------------------------------------------------------------

C8 = pytest.mark.criterion(8, "amenability suite")


@C8
def test_constant_exel_function_is_identity():
    for s in (sys_triv(), sys_tw(), sys_m2(), mor_pair().sigma):
        assert exel_coefficient(s, constant_exel_function(s)).distance(identity_map(s)) <= EXACT


@C8
def test_witness_transfers_across_mor_pair():
    data = mor_pair()
    s = data.sigma
    w = AmenabilityWitness(s, [exel_coefficient(s, constant_exel_function(s))])
    out, tr = transfer_witness(data, w, 1e-9)
    report = validate_witness(data.theta, out, 1e-9)
    assert report.ok and report.max_residual <= 1e-9
    assert all(v.positive for v in report.verdicts)
    assert tr.ratio <= tr.K * (1 + 1e-12)


# -- 9 -------------------------------------------------------------------------

@pytest.mark.criterion(9, "noncommutativity witness")
def test_matrix_unit_maps_do_not_commute():
    theta = mor_pair().theta
    alg = theta.algebra
    t12 = embed_algebra_element(theta, alg.matrix_unit(0, 0, 1))
    t21 = embed_algebra_element(theta, alg.matrix_unit(0, 1, 0))
    gap = np.max(np.abs(t12.compose(t21).maps - t21.compose(t12).maps))
    assert gap >= 0.5
