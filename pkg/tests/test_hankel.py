"""Special-function oracles: series, recurrences, Wronskian, Cauchy integrals."""

import numpy as np
import pytest

from helmres.errors import DomainError, RangeError
from helmres.hankel import (
    apply_recursion,
    bessel_j,
    bessel_y,
    hankel1,
    hankel_derivative_vectors,
    hankel_vector,
    recursion_matrix,
)
from conftest import contour_derivative, maclaurin_j0


def test_bessel_j_trivial_points():
    assert bessel_j(0, 0.0) == 1.0
    assert bessel_j(1, 0.0) == 0.0


def test_bessel_j_series_oracle():
    assert abs(bessel_j(0, 1.0) - maclaurin_j0(1.0)) < 1e-14
    z = 2.0 - 0.7j
    assert abs(bessel_j(0, z) - maclaurin_j0(z)) < 1e-13 * abs(maclaurin_j0(z))


def test_hankel1_literal():
    val = hankel1(0, 1.0)
    assert abs(val - (0.765197686557967 + 0.088256964215677j)) < 1e-13


def test_hankel1_zero_argument():
    with pytest.raises(DomainError):
        hankel1(0, 0.0)


def test_negative_order_symmetry():
    for z in (1.5 - 0.3j, 7.0 - 1.0j, 0.4 - 0.1j):
        assert abs(hankel1(-3, z) + hankel1(3, z)) < 1e-13 * abs(hankel1(3, z))
        assert abs(hankel1(-4, z) - hankel1(4, z)) < 1e-13 * abs(hankel1(4, z))


def test_range_guard():
    with pytest.raises(RangeError):
        bessel_j(300, 1.0)
    with pytest.raises(RangeError):
        hankel1(0, 5000.0)


def test_hankel_vector_recurrence_and_elementwise():
    z = 10.0 - 0.3j
    hv = hankel_vector(40, z)
    # Three-term recurrence at an interior entry.
    assert abs(hv.values[2] - ((2.0 / z) * hv.values[1] - hv.values[0])) < 1e-12 * abs(
        hv.values[2]
    )
    elementwise = np.array([hankel1(nu, z) for nu in range(40)])
    rel = np.abs(hv.values - elementwise) / np.abs(elementwise)
    assert rel.max() < 1e-12


def test_hankel_vector_negative_orders():
    hv = hankel_vector(6, 3.0 - 0.4j)
    neg = hv.negative_orders()
    signs = np.array([(-1.0) ** nu for nu in range(6)])
    assert np.allclose(neg, signs * hv.values, rtol=1e-14, atol=0.0)


def test_recursion_matrix_shape():
    B = recursion_matrix(5)
    expected = np.zeros((5, 5))
    expected[0, 1] = -1.0
    for i in range(1, 5):
        expected[i, i - 1] = 0.5
        if i + 1 < 5:
            expected[i, i + 1] = -0.5
    assert np.array_equal(B, expected)
    v = np.arange(5.0) + 1.0
    assert np.allclose(apply_recursion(v), B @ v)


def test_derivative_vectors_k0_and_k1():
    z = 4.0 - 0.5j
    vecs = hankel_derivative_vectors(6, 2, 1.0, z)
    assert np.allclose(vecs[0], hankel_vector(6, z).values, rtol=1e-13)
    # H_0' = -H_1.
    assert abs(vecs[1][0] + hankel1(1, z)) < 1e-12 * abs(hankel1(1, z))
    # H_nu' = (H_{nu-1} - H_{nu+1})/2 entrywise.
    hv = hankel_vector(8, z).values
    for nu in range(1, 5):
        expected = 0.5 * (hv[nu - 1] - hv[nu + 1])
        assert abs(vecs[1][nu] - expected) < 1e-12 * abs(expected)


def test_derivative_vectors_scaled_argument():
    # k-th vector carries the chain-rule factor a^k: d/dz H_nu(a z).
    a, z = 2.0, 3.0 - 0.2j
    vecs = hankel_derivative_vectors(4, 1, a, z)
    hv = hankel_vector(6, a * z).values
    for nu in range(1, 4):
        expected = a * 0.5 * (hv[nu - 1] - hv[nu + 1])
        assert abs(vecs[1][nu] - expected) < 1e-12 * abs(expected)


def test_derivative_vectors_contour_oracle():
    a, z = 2.0, 9.0 - 0.1j
    vecs = hankel_derivative_vectors(10, 5, a, z)
    for nu in (0, 3, 9):
        oracle = contour_derivative(lambda w: hankel1(nu, a * w), z, 5, radius=0.2)
        assert abs(vecs[5][nu] - oracle) < 1e-9 * abs(oracle)


def test_wronskian_grid():
    # J_nu Y_nu' - J_nu' Y_nu = 2/(pi z) on a sampled (nu, z) grid.
    zs = [x + 1j * y for x in (1.0, 10.0, 45.0, 120.0) for y in (-2.0, -0.5, 0.5)]
    for nu in (0, 5, 17, 40, 60):
        for z in zs:
            jm, jp = bessel_j(nu - 1, z), bessel_j(nu + 1, z)
            ym, yp = bessel_y(nu - 1, z), bessel_y(nu + 1, z)
            jd, yd = 0.5 * (jm - jp), 0.5 * (ym - yp)
            w = bessel_j(nu, z) * yd - jd * bessel_y(nu, z)
            target = 2.0 / (np.pi * z)
            assert abs(w - target) < 1e-10 * abs(target), (nu, z)


def test_dtn_symbol_negative_on_imaginary_axis():
    # lam a H_nu'(a lam)/H_nu(a lam) is real and strictly negative for lam = i t
    # (modified-Bessel sign property).
    for t in (0.5, 1.0, 2.0):
        for a in (1.0, 2.0):
            z = 1j * t * a
            hv = hankel_vector(22, z).values
            for nu in range(21):
                hp = -hv[1] if nu == 0 else 0.5 * (hv[nu - 1] - hv[nu + 1])
                val = 1j * t * a * hp / hv[nu]
                assert abs(val.imag) < 1e-10 * abs(val)
                assert val.real < 0.0
