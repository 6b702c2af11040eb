import math

import numpy as np
import pytest

from spectralpop.basis import Family, hermite_function_table, inverse_map
from spectralpop.errors import NumericError, ParameterError
from spectralpop.nodes import (
    CollocationGrid,
    chebyshev_gauss_radau,
    hermite_gauss,
    rc_radau_grid,
    transformed_hermite_grid,
)


def test_radau_n2():
    np.testing.assert_allclose(
        chebyshev_gauss_radau(2), [-1.0, -math.cos(2 * math.pi / 5), -math.cos(4 * math.pi / 5)], atol=1e-15
    )


@pytest.mark.parametrize("N", [2, 3, 7, 14, 40])
def test_radau_structure(N):
    y = chebyshev_gauss_radau(N)
    assert len(y) == N + 1 and y[0] == -1.0
    assert np.all(np.diff(y) > 0)
    assert np.all(y < 1.0)


def test_radau_rejects_small():
    with pytest.raises(ParameterError):
        chebyshev_gauss_radau(1)


def test_rc_grid_n2():
    g = rc_radau_grid(2, 1.0)
    c = math.cos(2 * math.pi / 5)
    np.testing.assert_allclose(g.abscissae, [(1 - c) / (1 + c)], rtol=1e-14)
    assert g.spec.family is Family.RATIONAL_CHEBYSHEV and g.count == 3


@pytest.mark.parametrize("N", [3, 5, 14])
def test_rc_grid_size(N):
    for drop in ("largest", "smallest"):
        g = rc_radau_grid(N, 2.0, drop=drop)
        assert len(g) == N - 1
        assert np.all(g.abscissae > 0) and np.all(np.isfinite(g.abscissae))


def test_rc_grid_drop_choice():
    full = 1.0 * (1 + chebyshev_gauss_radau(6)) / (1 - chebyshev_gauss_radau(6))
    np.testing.assert_allclose(rc_radau_grid(6, 1.0).abscissae, full[1:6])
    np.testing.assert_allclose(rc_radau_grid(6, 1.0, drop="smallest").abscissae, full[2:])
    with pytest.raises(ParameterError):
        rc_radau_grid(6, 1.0, drop="middle")


def test_rc_grid_origin_fixed_point():
    # y = 0 is a Radau point for no N, so check the map directly
    L = 3.3
    assert L * (1 + 0.0) / (1 - 0.0) == L
    g = rc_radau_grid(12, L)
    y = (g.abscissae - L) / (g.abscissae + L)
    np.testing.assert_allclose(y, chebyshev_gauss_radau(12)[1:12], atol=1e-14)


def test_hermite_small():
    np.testing.assert_allclose(hermite_gauss(2).abscissae, [-1 / math.sqrt(2), 1 / math.sqrt(2)], atol=1e-15)
    np.testing.assert_allclose(hermite_gauss(3).abscissae, [-math.sqrt(1.5), 0.0, math.sqrt(1.5)], atol=1e-15)
    np.testing.assert_allclose(hermite_gauss(1).abscissae, [0.0])
    assert hermite_gauss(1).classical_weights[0] == pytest.approx(math.sqrt(math.pi))


@pytest.mark.parametrize("M", [2, 5, 10, 20, 32, 64])
def test_hermite_nodes_are_roots(M):
    g = hermite_gauss(M)
    H = hermite_function_table(M, g.abscissae).value[:, M]
    scale = np.max(np.abs(hermite_function_table(M, np.linspace(-3, 3, 101)).value[:, M]))
    assert np.max(np.abs(H)) <= 1e-13 * max(scale, 1.0)
    np.testing.assert_allclose(g.abscissae, -g.abscissae[::-1], atol=1e-13)
    assert np.all(g.weights > 0)


@pytest.mark.parametrize("M", [1, 2, 5, 10, 20])
def test_hermite_exactness(M):
    g = hermite_gauss(M)
    w = g.classical_weights
    assert w.sum() == pytest.approx(math.sqrt(math.pi), abs=1e-12)
    v = np.ones(M)
    for p in range(2 * M):
        # odd moments cancel to ~1e-10 absolute under naive summation at M=20
        # (terms reach 1e6), so sum exactly; powers by repeated products keep
        # the sign symmetry that np.power does not guarantee
        exact = 0.0 if p % 2 else math.gamma((p + 1) / 2)
        got = math.fsum(w * v)
        v = v * g.abscissae
        assert abs(got - exact) <= 1e-11 * (1 + abs(exact)), (M, p, got, exact)


def test_transformed_grid():
    g = transformed_hermite_grid(3, 1.0)
    assert g.abscissae[1] == pytest.approx(math.log(1 + math.sqrt(2)), rel=1e-14)
    g20 = transformed_hermite_grid(20, 0.5)
    assert np.all(g20.abscissae > 0) and np.all(np.diff(g20.abscissae) > 0)
    np.testing.assert_allclose(g20.abscissae, inverse_map(hermite_gauss(20).abscissae, 0.5))
    assert g20.weights is None and g20.count == 20 and g20.spec.k == 0.5


def test_grid_validation():
    with pytest.raises(NumericError):
        CollocationGrid(np.array([0.0, 0.0, 1.0]))
    with pytest.raises(NumericError):
        CollocationGrid(np.array([0.0, np.inf]))
    with pytest.raises(NumericError):
        CollocationGrid(np.array([0.0, 1.0]), weights=np.array([1.0, -1.0]))
    with pytest.raises(ParameterError):
        CollocationGrid(np.array([1.0, 2.0])).classical_weights
    g = CollocationGrid([1.0, 2.0])
    with pytest.raises(ValueError):
        g.abscissae[0] = 5.0
