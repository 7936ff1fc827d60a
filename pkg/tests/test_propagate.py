"""Transfer-matrix integration against closed-form oracles."""
import cmath
import math

import numpy as np
import pytest

from blochtk import Problem1D, propagate, propagate_fundamental, system_matrix
from blochtk.catalog import get_problem
from blochtk.coeffs import (PeriodicCoefficient, kronig_penney_potential,
                            zero_coefficient)
from blochtk.lattice import Lattice1D


def constant_transfer(lam: complex, v0: complex, length: float) -> np.ndarray:
    """Fundamental matrix of -y'' + v0*y = lam*y over `length` (analytic)."""
    s = cmath.sqrt(lam - v0)
    if abs(s) < 1e-14:
        return np.array([[1.0, length], [0.0, 1.0]], dtype=complex)
    return np.array([[cmath.cos(s * length), cmath.sin(s * length) / s],
                     [-s * cmath.sin(s * length), cmath.cos(s * length)]],
                    dtype=complex)


def test_system_matrix_entries():
    p = get_problem("constant_v5")
    A = system_matrix(p, 2.0, 0.3)
    assert np.allclose(A, [[0, 1], [5.0 - 2.0, 0]], atol=1e-14)


@pytest.mark.parametrize("lam", [4.0, 0.25, -1.0, -9.0])
def test_free_particle_closed_form(lam):
    p = get_problem("free")
    T = propagate(p, lam, 0.0, p.lattice.gamma, rtol=1e-12)
    ref = constant_transfer(lam, 0.0, p.lattice.gamma)
    assert np.max(np.abs(T.matrix - ref)) <= 1e-10 * max(1, np.abs(ref).max())


@pytest.mark.parametrize("lam", [7.3, 5.0, 1.0])
def test_constant_potential_closed_form(lam):
    p = get_problem("constant_v5")
    T = propagate(p, lam, 0.0, 1.0)
    ref = constant_transfer(lam, 5.0, 1.0)
    assert np.max(np.abs(T.matrix - ref)) <= 1e-10 * max(1, np.abs(ref).max())


@pytest.mark.parametrize("lam", [3.0, 12.5, -2.0])
def test_kronig_penney_piecewise_product(lam):
    # analytic oracle: barrier transfer times well transfer
    p = get_problem("kronig_penney")
    ref = constant_transfer(lam, 0.0, 0.7) @ constant_transfer(lam, 10.0, 0.3)
    T = propagate(p, lam, 0.0, 1.0)
    assert np.max(np.abs(T.matrix - ref)) <= 1e-9 * max(1, np.abs(ref).max())


def test_composition_over_subintervals():
    p = get_problem("mathieu_q1")
    lam = 2.0
    g = p.lattice.gamma
    whole = propagate(p, lam, 0.0, g).matrix
    halves = propagate(p, lam, g / 2, g).matrix @ propagate(p, lam, 0.0, g / 2).matrix
    assert np.max(np.abs(whole - halves)) <= 1e-9


def test_drift_term_determinant():
    # with constant W, det X(b) = exp(W*(b-a)) by the Wronskian identity
    p = get_problem("drift_w")
    T = propagate(p, 1.7, 0.0, 1.0)
    det = np.linalg.det(T.matrix)
    assert abs(det - cmath.exp(0.7 + 0.3j)) <= 1e-9 * abs(det)


def test_convergence_under_rtol_halving():
    p = get_problem("mathieu_q1")
    lam = 6.0
    coarse = propagate_fundamental(p.w, p.v, lam, 0.0, p.lattice.gamma, rtol=1e-6)
    fine = propagate_fundamental(p.w, p.v, lam, 0.0, p.lattice.gamma, rtol=1e-12)
    err_coarse = np.max(np.abs(coarse.matrix - fine.matrix))
    assert err_coarse > 0
    mid = propagate_fundamental(p.w, p.v, lam, 0.0, p.lattice.gamma, rtol=1e-9)
    err_mid = np.max(np.abs(mid.matrix - fine.matrix))
    assert err_mid < err_coarse
    assert err_mid <= 1e-7


def test_error_estimate_is_reported():
    p = get_problem("mathieu_q1")
    T = propagate(p, 2.0, 0.0, p.lattice.gamma)
    assert T.error_estimate > 0
    assert T.steps > 0


def test_period_validation():
    lat = Lattice1D(1.0)
    bad_v = PeriodicCoefficient.constant(1.0, 2.0)
    with pytest.raises(ValueError):
        Problem1D(lat, zero_coefficient(1.0), bad_v)


def test_kp_builder_validates_width():
    with pytest.raises(ValueError):
        kronig_penney_potential(10.0, 1.5, 1.0)
