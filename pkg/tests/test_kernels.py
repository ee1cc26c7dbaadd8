import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from svdsvm_ids.errors import DimensionMismatch
from svdsvm_ids.kernels import Linear, Polynomial, Rbf, Sigmoid, kernel_eval, parse_kernel

KERNELS = [Linear(), Polynomial(2), Polynomial(3), Rbf(0.7), Sigmoid(0.5, -0.2)]


def test_rbf_zero_distance():
    assert kernel_eval(Rbf(2.0), [1.0, 2.0], [1.0, 2.0]) == 1.0


def test_polynomial_degree_two():
    assert kernel_eval(Polynomial(2), [1.0, 1.0], [1.0, 1.0]) == 9.0


def test_sigmoid_orthogonal():
    assert kernel_eval(Sigmoid(1.0, 0.0), [1.0, 0.0], [0.0, 1.0]) == 0.0


def test_linear_orthogonal():
    assert kernel_eval(Linear(), [1.0, 0.0], [0.0, 1.0]) == 0.0


def test_rbf_value():
    # ||(0,0)-(1,1)||^2 = 2, sigma^2 = 0.5  ->  exp(-2 / 1)
    assert kernel_eval(Rbf(0.5), [0.0, 0.0], [1.0, 1.0]) == pytest.approx(math.exp(-2.0), rel=1e-15)
    assert Rbf.from_sigma(2.0) == Rbf(4.0)
    assert Rbf.default_for(122).sigma_sq == 61.0


def test_dimension_mismatch():
    for k in KERNELS:
        with pytest.raises(DimensionMismatch):
            k([1.0, 2.0], [1.0])
        with pytest.raises(DimensionMismatch):
            k.gram(np.ones((2, 3)), np.ones((2, 2)))


def test_invalid_parameters():
    with pytest.raises(ValueError):
        Polynomial(0)
    with pytest.raises(ValueError):
        Rbf(0.0)


vec = arrays(np.float64, 4, elements=st.floats(-3, 3, allow_nan=False))


@settings(max_examples=200, deadline=None)
@given(vec, vec)
def test_symmetry_exact(a, b):
    for k in KERNELS:
        assert k(a, b) == k(b, a)


@pytest.mark.parametrize("kernel", KERNELS, ids=lambda k: k.to_text())
def test_gram_matches_scalar(kernel, rng):
    a = rng.random((6, 4))
    b = rng.random((5, 4))
    g = kernel.gram(a, b)
    ref = np.array([[kernel(x, y) for y in b] for x in a])
    assert np.allclose(g, ref, rtol=1e-12, atol=1e-12)
    assert np.allclose(kernel.diag(a), [kernel(x, x) for x in a], rtol=1e-12)


@pytest.mark.parametrize("kernel", [Linear(), Polynomial(2), Polynomial(3), Rbf(0.3), Rbf(5.0)],
                         ids=lambda k: k.to_text())
def test_gram_positive_semidefinite(kernel, rng):
    for _ in range(10):
        pts = rng.standard_normal((15, 3))
        g = kernel.gram(pts, pts)
        lam_min = np.linalg.eigvalsh(g).min()
        assert lam_min >= -1e-8 * max(1.0, np.abs(g).max())


@pytest.mark.parametrize("kernel", KERNELS, ids=lambda k: k.to_text())
def test_text_round_trip(kernel):
    assert parse_kernel(kernel.to_text()) == kernel
