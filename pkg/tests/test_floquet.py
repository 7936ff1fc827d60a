"""Multipliers, Jordan structure, quasimomenta, and solution forms."""
import cmath
import math

import numpy as np
import pytest

from blochtk import (CongruenceClass, Lattice1D, boundedness, class_distance,
                     class_equal, classify, jordan_classify, matrix_log,
                     monodromy, multipliers, quasimomentum, reduce_quasimomentum,
                     verify_sum_rule)
from blochtk.catalog import get_problem
from blochtk.floquet import (J1, J2, J3, floquet_data, p1_zero_check,
                             shifted_operator_residual, zero_of_bloch_check)


# -- plain matrices (no integration) ----------------------------------------

def test_multipliers_identity_and_shear():
    assert multipliers(np.eye(2)) == (1.0 + 0j, 1.0 + 0j)
    assert multipliers(-np.eye(2)) == (-1.0 + 0j, -1.0 + 0j)
    mus = multipliers(np.array([[2.0, 0.0], [0.0, 0.5]]))
    assert sorted(abs(m) for m in mus) == pytest.approx([0.5, 2.0])


def test_multipliers_stable_for_tiny_and_huge():
    big = 1e8
    mus = multipliers(np.array([[big, 0.0], [0.0, 1.0 / big]]))
    assert abs(mus[0] * mus[1] - 1.0) <= 1e-12  # product = det exactly


def test_jordan_tags_on_canonical_matrices():
    assert jordan_classify(np.eye(2)) == J1
    assert jordan_classify(np.array([[1.0, 1.0], [0.0, 1.0]])) == J2
    assert jordan_classify(np.array([[2.0, 0.0], [0.0, 0.5]])) == J3


def test_quasimomentum_examples():
    lat = Lattice1D(2 * math.pi)
    k = quasimomentum(1.0 + 0j, lat)
    assert class_equal(k, CongruenceClass(0.0, lat.modulus))
    k = quasimomentum(-1.0 + 0j, lat)
    assert class_equal(k, CongruenceClass(0.5, lat.modulus))  # pi/gamma = 1/2
    # a real multiplier e^{2*pi} over gamma = 2*pi has purely imaginary k = -i
    k = quasimomentum(cmath.exp(2 * math.pi), lat)
    assert abs(k.representative - (-1j)) <= 1e-12


def test_matrix_log_reproduces_monodromy():
    m = np.array([[0.0, 1.0], [-1.0, 0.0]])  # rotation, mu = +/- i
    C, ill = matrix_log(m, J3, gamma=1.0)
    assert not ill
    from scipy.linalg import expm
    assert np.allclose(expm(C), m, atol=1e-12)


# -- integrated problems -----------------------------------------------------

def test_free_particle_zero_energy_is_defective():
    p = get_problem("free")
    res = classify(p, 0.0, grid_n=None)
    assert res.data.jordan == J2
    assert res.qmap.sigma_tag == 2
    assert class_equal(res.qmap.classes[0],
                       CongruenceClass(0.0, p.lattice.modulus))


def test_free_particle_negative_energy_two_classes():
    p = get_problem("free")
    res = classify(p, -1.0, grid_n=None)
    assert res.qmap.sigma_tag == 3
    # multipliers e^{+/-2*pi}; classes +/- i
    reps = sorted(c.representative.imag for c in res.qmap.classes)
    assert reps == pytest.approx([-1.0, 1.0], abs=1e-9)
    assert all(abs(c.representative.real) <= 1e-9 for c in res.qmap.classes)


def test_free_particle_positive_energy_real_classes():
    p = get_problem("free")
    res = classify(p, 0.25, grid_n=None)  # multipliers e^{+/- i pi}, degenerate
    assert res.qmap.sigma_tag in (1, 2)
    assert abs(res.qmap.classes[0].representative - 0.5) <= 1e-9


def test_monodromy_caches_segment_determinant():
    p = get_problem("drift_w")
    m = monodromy(p, 3.0)
    assert abs(m.determinant - cmath.exp(0.7 + 0.3j)) <= 1e-10


def test_sum_rule_with_drift():
    p = get_problem("drift_w")
    for lam in (0.5, 2.0, -1.5):
        rep = verify_sum_rule(p, lam)
        assert rep["ok"], rep


def test_form3_extraction_mathieu():
    p = get_problem("mathieu_q1")
    res = classify(p, 2.0, grid_n=512)
    form = res.form
    assert form.kind == "form3"
    assert form.periodicity_deviation <= 1e-7
    assert max(shifted_operator_residual(p, 2.0, form)) <= 1e-5
    assert boundedness(form)


def test_form2_extraction_constant():
    p = get_problem("constant_v5")
    res = classify(p, 5.0, grid_n=512)  # lam = V0: defective with k = [0]
    form = res.form
    assert form.kind == "form2"
    assert max(shifted_operator_residual(p, 5.0, form)) <= 1e-5
    rep = p1_zero_check(p, 5.0, form)
    assert rep["consistent"]
    assert class_equal(form.classes[0],
                       CongruenceClass(0.0, p.lattice.modulus))


def test_unbounded_inside_gap():
    p = get_problem("mathieu_q1")
    res = classify(p, 1.0, grid_n=512)  # in the first gap
    assert not boundedness(res.form)
    assert any(abs(c.representative.imag) > 1e-6 for c in res.qmap.classes)


def test_zero_of_bloch_quasimomenta():
    p = get_problem("free")
    rep = zero_of_bloch_check(p, 1.0)
    assert rep["applicable"]
    # sign-changing real Bloch functions only occur at k in {[0], [pi/gamma]}
    for item in rep["parts"]:
        if item.get("zero_found"):
            assert item["k_in_zero_or_half_class"]
            assert item["real_after_phase"]


def test_class_cardinality_never_exceeds_two():
    p = get_problem("kronig_penney")
    for lam in np.linspace(-2, 18, 21):
        res = classify(p, float(lam), grid_n=None)
        assert 1 <= len(res.qmap.classes) <= 2


def test_negation_symmetry_real_potential():
    p = get_problem("mathieu_q1")
    for lam in (0.1, 2.5, 7.0, -0.3):
        res = classify(p, lam, grid_n=None)
        classes = res.qmap.classes
        neg = [reduce_quasimomentum(-c.representative, p.lattice)
               for c in classes]
        for c in classes:
            assert min(class_distance(c, n) for n in neg) <= 1e-8
