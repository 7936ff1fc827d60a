"""Lattice-sum transform: defining properties, inversion, Parseval."""
import math

import numpy as np
import pytest

from blochtk import (Lattice1D, SampledFunction, bloch_floquet,
                     check_properties, from_callable, invert,
                     parseval_deviation)


def gaussian(center, width):
    return lambda x: np.exp(-((x - center) / width) ** 2)


@pytest.fixture(scope="module")
def field():
    lat = Lattice1D(1.0)
    f = from_callable(gaussian(1.5, 0.3), lat, cells=3, per_cell=64)
    ks = np.linspace(-math.pi, math.pi, 17)
    return bloch_floquet(f, ks)


def test_values_match_dense_lattice_sum(field):
    # oracle: direct evaluation of sum_m f(r + m*gamma) e^{-ik m gamma}
    f = gaussian(1.5, 0.3)
    r = float(field.r_points[10])
    k = float(field.k_points[3])
    ref = sum(f(np.array([r + m])) [0]* np.exp(-1j * k * m)
              for m in range(-8, 9))
    assert field.values[10, 3] == pytest.approx(ref, abs=1e-12)


def test_quasi_periodicity_and_k_periodicity(field):
    props = check_properties(field)
    assert props["r_quasiperiodicity"] <= 1e-10
    assert props["k_periodicity"] <= 1e-10


def test_single_cell_roundtrip_exact():
    lat = Lattice1D(2.0)
    f = from_callable(gaussian(1.0, 0.2), lat, cells=1, per_cell=64)
    field = bloch_floquet(f, np.linspace(-math.pi / 2, math.pi / 2, 9))
    rec, err = invert(field, quadrature_n=8)
    assert err <= 1e-12
    assert np.allclose(rec.samples, f.samples, atol=1e-12)


def test_roundtrip_three_cells(field):
    _, err = invert(field, quadrature_n=64)
    assert err <= 1e-10


def test_parseval(field):
    assert parseval_deviation(field, quadrature_n=64) <= 1e-8


def test_linearity():
    lat = Lattice1D(1.0)
    ks = np.linspace(-math.pi, math.pi, 9)
    fa = from_callable(gaussian(1.5, 0.3), lat, 3, 32)
    fb = from_callable(gaussian(1.2, 0.25), lat, 3, 32)
    fsum = SampledFunction(lat, fa.x0, fa.spacing, fa.samples + 2.0 * fb.samples)
    lhs = bloch_floquet(fsum, ks).values
    rhs = bloch_floquet(fa, ks).values + 2.0 * bloch_floquet(fb, ks).values
    assert np.max(np.abs(lhs - rhs)) <= 1e-12


def test_real_function_conjugation_symmetry(field):
    # for real-valued f: U f(r, -k) = conj(U f(r, k)); k grid is symmetric
    assert np.max(np.abs(field.values[:, ::-1] -
                         np.conj(field.values))) <= 1e-12


def test_spacing_must_divide_period():
    lat = Lattice1D(1.0)
    with pytest.raises(ValueError):
        SampledFunction(lat, 0.0, 0.3, np.zeros(10, dtype=complex))
