"""Grid construction, quadrature, and differentiation matrices."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose
from scipy.special import erf

from funcoord import (
    DomainError,
    UnsupportedOrderError,
    diff_matrix,
    inner_product,
    make_uniform_grid,
)
from funcoord.grid import OperatorMatrix, fd_weights


def test_trapezoid_grid_nodes_and_weights():
    g = make_uniform_grid(0.0, 1.0, 11, periodic=False)
    assert_allclose(g.nodes, np.linspace(0, 1, 11), atol=0)
    expected = np.full(11, 0.1)
    expected[0] = expected[-1] = 0.05
    assert_allclose(g.weights, expected, atol=1e-16)


def test_periodic_grid_excludes_endpoint_equal_weights():
    g = make_uniform_grid(0.0, 2 * np.pi, 16, periodic=True)
    assert g.n == 16
    assert g.nodes[-1] < 2 * np.pi
    assert_allclose(g.weights, np.full(16, 2 * np.pi / 16), rtol=1e-15)


def test_weights_sum_to_measure():
    g = make_uniform_grid(-5.0, 5.0, 64, periodic=False)
    assert abs(g.weights.sum() - 10.0) < 1e-12 * 10.0


@settings(max_examples=30, deadline=None)
@given(
    lo=st.floats(-50, 50),
    span=st.floats(0.1, 100),
    n=st.integers(8, 80),
    periodic=st.booleans(),
)
def test_weights_partition_any_interval(lo, span, n, periodic):
    g = make_uniform_grid(lo, lo + span, n, periodic)
    assert abs(g.weights.sum() - span) <= 1e-12 * span
    assert np.all(np.diff(g.nodes) > 0)


@pytest.mark.parametrize("bad", [(0.0, 1.0, 7), (1.0, 1.0, 16), (2.0, 1.0, 16)])
def test_grid_rejects_bad_parameters(bad):
    lo, hi, n = bad
    with pytest.raises(DomainError):
        make_uniform_grid(lo, hi, n)


def test_inner_product_of_ones_is_measure():
    g = make_uniform_grid(0.0, 1.0, 16, periodic=False)
    assert abs(inner_product(np.ones(16), np.ones(16), g) - 1.0) < 1e-14


def test_inner_product_orthogonality_and_norm():
    g = make_uniform_grid(0.0, 2 * np.pi, 32, periodic=True)
    s, c = np.sin(g.nodes), np.cos(g.nodes)
    assert abs(inner_product(s, c, g)) < 1e-12
    assert abs(inner_product(s, s, g) - np.pi) < 1e-10


def test_inner_product_conjugate_symmetry():
    g = make_uniform_grid(0.0, 1.0, 12, periodic=False)
    rng = np.random.default_rng(3)
    f = rng.normal(size=12) + 1j * rng.normal(size=12)
    h = rng.normal(size=12) + 1j * rng.normal(size=12)
    assert abs(inner_product(f, h, g) - np.conj(inner_product(h, f, g))) < 1e-13


def test_inner_product_length_mismatch():
    g = make_uniform_grid(0.0, 1.0, 12, periodic=False)
    with pytest.raises(DomainError):
        inner_product(np.ones(10), np.ones(12), g)


@pytest.mark.parametrize("periodic", [True, False])
@pytest.mark.parametrize("q", [1, 2, 3, 4])
def test_diff_of_constant_is_zero(periodic, q):
    g = make_uniform_grid(-1.0, 1.0, 24, periodic=periodic)
    d = diff_matrix(g, q).entries @ np.ones(24)
    # matrix entries grow like h^-q, so the achievable cancellation floor
    # rises with the order
    tol = 1e-12 if q <= 2 else 1e-8
    assert np.max(np.abs(d)) < tol


def test_spectral_first_derivative_of_sine():
    g = make_uniform_grid(0.0, 2 * np.pi, 32, periodic=True)
    d = diff_matrix(g, 1).entries @ np.sin(g.nodes)
    assert np.max(np.abs(d - np.cos(g.nodes))) < 1e-10


def test_spectral_second_derivative_of_sine():
    g = make_uniform_grid(0.0, 2 * np.pi, 32, periodic=True)
    d = diff_matrix(g, 2).entries @ np.sin(g.nodes)
    assert np.max(np.abs(d + np.sin(g.nodes))) < 1e-9


def test_first_derivative_composes_to_second():
    g = make_uniform_grid(0.0, 2 * np.pi, 32, periodic=True)
    d1 = diff_matrix(g, 1).entries
    d2 = diff_matrix(g, 2).entries
    phi = np.sin(g.nodes) + 0.3 * np.cos(3 * g.nodes)
    assert np.max(np.abs(d1 @ (d1 @ phi) - d2 @ phi)) < 1e-8


def test_quadrature_second_order_convergence():
    exact = np.sqrt(np.pi) * erf(6.0)
    errors = []
    for n in (9, 17, 33):
        g = make_uniform_grid(-6.0, 6.0, n, periodic=False)
        f = np.exp(-g.nodes**2)
        errors.append(abs(inner_product(f, np.ones(n), g) - exact))
    # at least 2nd order: each doubling divides the error by >= 4
    assert errors[1] <= errors[0] / 4.0
    assert errors[2] <= errors[1] / 4.0 or errors[2] < 1e-14


def test_fd_matrix_exact_on_cubics():
    g = make_uniform_grid(-2.0, 3.0, 20, periodic=False)
    x = g.nodes
    d1 = diff_matrix(g, 1).entries @ x**3
    assert np.max(np.abs(d1 - 3 * x**2)) < 1e-10
    d2 = diff_matrix(g, 2).entries @ x**3
    assert np.max(np.abs(d2 - 6 * x)) < 1e-9


def test_fd_first_derivative_fourth_order():
    errs = []
    for n in (33, 65):
        g = make_uniform_grid(-1.0, 1.0, n, periodic=False)
        d = diff_matrix(g, 1).entries @ np.sin(g.nodes)
        errs.append(np.max(np.abs(d - np.cos(g.nodes))))
    # halving h should shrink the error by about 2^4
    assert errs[1] < errs[0] / 10.0


def test_diff_matrix_order_validation():
    g = make_uniform_grid(0.0, 1.0, 16, periodic=False)
    with pytest.raises(UnsupportedOrderError):
        diff_matrix(g, 0)
    with pytest.raises(UnsupportedOrderError):
        diff_matrix(g, 5)
    # periodic grids differentiate to any order spectrally
    gp = make_uniform_grid(0.0, 2 * np.pi, 16, periodic=True)
    diff_matrix(gp, 6)


def test_fd_weights_recover_taylor_coefficients():
    x = np.array([-2.0, -1.0, 0.0, 1.0, 2.0])
    w = fd_weights(x, 0.0, 1)
    assert_allclose(w, [1 / 12, -8 / 12, 0, 8 / 12, -1 / 12], atol=1e-13)


def test_operator_matrix_validation():
    g = make_uniform_grid(0.0, 1.0, 8, periodic=False)
    with pytest.raises(DomainError):
        OperatorMatrix(np.zeros((3, 4)))
    with pytest.raises(DomainError):
        OperatorMatrix(np.zeros((4, 4)), g)
    detached = OperatorMatrix(np.eye(3))
    assert detached.grid is None and detached.n == 3
