import math

import numpy as np
import pytest

from expander_cs import DesignMatrix, matching_graph, random_left_regular
from expander_cs.rng import gaussians


def test_entry_value_and_column_norms():
    g = random_left_regular(10, 2, 6, seed=1)
    X = DesignMatrix.from_graph(g)
    dense = X.to_dense()
    values = set(np.unique(dense))
    assert values == {0.0, 0.5}                       # d = 2 stores 1/2
    np.testing.assert_array_equal(np.abs(dense).sum(axis=0), np.ones(10))
    for i in range(10):
        assert np.linalg.norm(dense[:, i]) == pytest.approx(1 / math.sqrt(2), rel=1e-15)


def test_matching_design_is_identity():
    X = DesignMatrix.from_graph(matching_graph(4))
    np.testing.assert_array_equal(X.to_dense(), np.eye(4))
    v = np.array([3.0, -1.0, 0.5, 2.0])
    np.testing.assert_array_equal(X.matvec(v), v)
    np.testing.assert_array_equal(X.transpose_matvec(v), v)


def test_matvec_of_basis_vector_is_indicator():
    g = random_left_regular(5, 3, 7, seed=2)
    X = DesignMatrix.from_graph(g)
    e2 = np.zeros(5)
    e2[2] = 1.0
    out = X.matvec(e2)
    expected = np.zeros(7)
    expected[list(g.neighbors[2])] = 1 / 3
    np.testing.assert_array_equal(out, expected)


def test_transpose_all_ones_gives_ones():
    for d in (2, 3, 8, 12):
        g = random_left_regular(6, d, 20, seed=d)
        X = DesignMatrix.from_graph(g)
        np.testing.assert_array_equal(X.transpose_matvec(np.ones(20)), np.ones(6))


def test_adjoint_identity():
    g = random_left_regular(12, 4, 9, seed=3)
    X = DesignMatrix.from_graph(g)
    for t in range(20):
        gamma = gaussians(100 + t, 12)
        z = gaussians(200 + t, 9)
        assert abs(X.matvec(gamma) @ z - gamma @ X.transpose_matvec(z)) <= 1e-12


def test_l1_contraction_and_cauchy_schwarz():
    g = random_left_regular(15, 5, 11, seed=4)
    X = DesignMatrix.from_graph(g)
    for t in range(50):
        gamma = gaussians(300 + t, 15)
        img = X.matvec(gamma)
        assert np.abs(img).sum() <= np.abs(gamma).sum() + 1e-12
        assert np.abs(img).sum() <= math.sqrt(11) * np.linalg.norm(img) + 1e-12


def test_nonamplification_exact():
    g = random_left_regular(30, 6, 18, seed=5)
    X = DesignMatrix.from_graph(g)
    for t in range(200):
        z = gaussians(400 + t, 18)
        assert np.max(np.abs(X.transpose_matvec(z))) <= np.max(np.abs(z))


def test_shape_mismatch_errors():
    X = DesignMatrix.from_graph(matching_graph(3))
    with pytest.raises(ValueError):
        X.matvec(np.ones(4))
    with pytest.raises(ValueError):
        X.transpose_matvec(np.ones(2))


def test_dense_csv_roundtrip(tmp_path):
    g = random_left_regular(4, 3, 5, seed=6)
    X = DesignMatrix.from_graph(g)
    path = tmp_path / "X.csv"
    X.write_dense_csv(path)
    rows = [line.split(",") for line in path.read_text().strip().split("\n")]
    parsed = np.array([[float(v) for v in row] for row in rows])
    np.testing.assert_array_equal(parsed, X.to_dense())
    assert parsed.shape == (5, 4)
