"""Core linear-algebra plumbing against independent small-matrix oracles."""

import numpy as np
import pytest

from rmtdiff import linalg
from rmtdiff.errors import DimensionError


def cofactor_det(m: np.ndarray) -> complex:
    """Reference determinant by first-row cofactor expansion (oracle only)."""
    n = m.shape[0]
    if n == 1:
        return complex(m[0, 0])
    total = 0.0 + 0.0j
    for j in range(n):
        minor = np.delete(np.delete(m, 0, axis=0), j, axis=1)
        total += (-1) ** j * m[0, j] * cofactor_det(minor)
    return total


def test_determinant_identity():
    assert linalg.determinant(np.eye(3)) == pytest.approx(1.0)


def test_determinant_triangular_product():
    assert linalg.determinant(np.diag([2.0, 3.0j])) == pytest.approx(6.0j)


def test_determinant_matches_cofactor_oracle():
    rng = np.random.default_rng(1234)
    m = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    expected = cofactor_det(m)
    got = linalg.determinant(m)
    assert abs(got - expected) <= 1e-12 * abs(expected)


def test_determinant_rejects_non_square():
    with pytest.raises(DimensionError):
        linalg.determinant(np.ones((2, 3)))


def test_determinant_permutation_parity():
    rng = np.random.default_rng(77)
    m = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    base = linalg.determinant(m)
    perm = [2, 0, 1, 3]  # two transpositions: even parity
    even = linalg.determinant(m[perm])
    assert abs(even - base) <= 1e-12 * abs(base)
    odd = linalg.determinant(m[[1, 0, 2, 3]])
    assert abs(odd + base) <= 1e-12 * abs(base)


def test_block2x2_identity():
    out = linalg.block2x2(np.eye(2), np.zeros((2, 2)), np.zeros((2, 2)), np.eye(2))
    assert np.array_equal(out, np.eye(4))


def test_block2x2_scalar_determinant():
    z, w = 0.7 + 0.4j, -0.2 + 0.9j
    m = linalg.block2x2([[z]], [[-np.conj(w)]], [[w]], [[np.conj(z)]])
    assert linalg.determinant(m) == pytest.approx(abs(z) ** 2 + abs(w) ** 2)


def test_block2x2_placement_oracle():
    rng = np.random.default_rng(5150)
    a, b, c, d = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
                  for _ in range(4))
    out = linalg.block2x2(a, b, c, d)
    # index-map oracle: entry (i, j) comes from the block owning that corner
    for i in range(4):
        for j in range(4):
            src = (a, b, c, d)[(i >= 2) * 2 + (j >= 2)]
            assert out[i, j] == src[i % 2, j % 2]


def test_block2x2_rejects_mismatch():
    with pytest.raises(DimensionError):
        linalg.block2x2(np.eye(2), np.zeros((3, 2)), np.zeros((2, 2)), np.eye(2))


def test_block2x2_commuting_blocks_det():
    rng = np.random.default_rng(22)
    a, b, c, d = (np.diag(rng.standard_normal(3) + 1j * rng.standard_normal(3))
                  for _ in range(4))
    lhs = linalg.determinant(linalg.block2x2(a, b, c, d))
    rhs = linalg.determinant(a @ d - c @ b)
    assert abs(lhs - rhs) <= 1e-12 * abs(rhs)


def test_kron_identity_left():
    m = np.arange(4.0).reshape(2, 2) + 1j
    assert np.array_equal(linalg.kron(np.array([[1.0]]), m), m)


def test_kron_dimension_law():
    out = linalg.kron(np.ones((2, 2)), np.ones((3, 3)))
    assert out.shape == (6, 6)


def test_kron_diag_elementwise():
    z1, z2 = 1.5 + 0.5j, -0.25j
    out = linalg.kron(np.diag([z1, z2]), np.eye(2))
    assert np.array_equal(out, np.diag([z1, z1, z2, z2]))


def test_kron_elementwise_definition_oracle():
    rng = np.random.default_rng(9)
    a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    b = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    out = linalg.kron(a, b)
    for i in range(2):
        for j in range(2):
            for k in range(3):
                for l in range(3):
                    assert out[3 * i + k, 3 * j + l] == a[i, j] * b[k, l]


def test_kron_determinant_identity():
    rng = np.random.default_rng(13)
    a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    b = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    lhs = linalg.determinant(linalg.kron(a, b))
    rhs = linalg.determinant(a) ** 3 * linalg.determinant(b) ** 2
    assert abs(lhs - rhs) <= 1e-10 * abs(rhs)
