"""Small dense complex matrix helpers, cross-checked against scipy."""

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from holo.errors import DimensionMismatch, NotAntiHermitian
from holo.matrix import (
    as_matrix,
    dagger,
    expm_antihermitian,
    frobenius,
    polar_unitary,
    subspace_block,
    unitary_distance,
    unitarity_defect,
)


def random_antihermitian(rng, d):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return 0.5 * (g - g.conj().T)


def random_unitary(rng, d):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return np.linalg.qr(g)[0]


class TestAsMatrix:
    def test_accepts_nested_lists(self):
        m = as_matrix([[1, 0], [0, 1]])
        assert m.dtype == complex and m.shape == (2, 2)

    def test_rejects_odd_dimensions(self):
        with pytest.raises(DimensionMismatch):
            as_matrix(np.eye(3))

    def test_rejects_non_square(self):
        with pytest.raises(DimensionMismatch):
            as_matrix(np.zeros((2, 4)))

    def test_rejects_non_finite(self):
        bad = np.eye(2, dtype=complex)
        bad[0, 1] = np.nan
        with pytest.raises(DimensionMismatch):
            as_matrix(bad)

    def test_accepts_non_contiguous_views(self):
        # conj().T returns a transposed view; the finiteness check must not
        # assume contiguity
        base = np.arange(16, dtype=complex).reshape(4, 4) + 1j
        out = as_matrix(base.conj().T)
        assert np.array_equal(out, base.conj().T)


def test_dagger_reverses_products():
    rng = np.random.default_rng(3)
    a, b = random_unitary(rng, 4), random_unitary(rng, 4)
    assert np.allclose(dagger(a @ b), dagger(b) @ dagger(a), atol=1e-14)


def test_frobenius_matches_numpy():
    rng = np.random.default_rng(4)
    m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    assert frobenius(m) == pytest.approx(np.linalg.norm(m), abs=0)


class TestExpmAntihermitian:
    @pytest.mark.parametrize("d", [2, 4])
    def test_matches_scipy(self, d):
        rng = np.random.default_rng(5)
        for _ in range(20):
            l = random_antihermitian(rng, d)
            assert unitary_distance(
                expm_antihermitian(l), scipy.linalg.expm(l)
            ) < 1e-12

    def test_result_is_unitary(self):
        rng = np.random.default_rng(6)
        l = 50.0 * random_antihermitian(rng, 4)  # large norm stays unitary
        assert unitarity_defect(expm_antihermitian(l)) < 1e-12

    def test_zero_gives_identity(self):
        assert np.array_equal(expm_antihermitian(np.zeros((2, 2))), np.eye(2))

    def test_rejects_hermitian_input(self):
        with pytest.raises(NotAntiHermitian):
            expm_antihermitian(np.eye(2))

    def test_tolerance_is_configurable(self):
        almost = 1j * np.eye(2) + 1e-9
        with pytest.raises(NotAntiHermitian):
            expm_antihermitian(almost)
        expm_antihermitian(almost, tol=1e-6)


def test_unitary_distance_shape_check():
    with pytest.raises(DimensionMismatch):
        unitary_distance(np.eye(2), np.eye(4))


def test_subspace_blocks_partition_the_diagonal():
    m = np.arange(16, dtype=complex).reshape(4, 4)
    assert np.array_equal(subspace_block(m, "plus"), m[:2, :2])
    assert np.array_equal(subspace_block(m, "minus"), m[2:, 2:])
    with pytest.raises(DimensionMismatch):
        subspace_block(m, "upper")
    with pytest.raises(DimensionMismatch):
        subspace_block(np.eye(2), "plus")


class TestPolarUnitary:
    def test_recovers_unitary_from_positive_scaling(self):
        rng = np.random.default_rng(7)
        u = random_unitary(rng, 2)
        assert unitary_distance(polar_unitary(2.5 * u), u) < 1e-12

    def test_is_closest_in_frobenius_norm(self):
        # distance to the polar factor must not exceed distance to other
        # unitaries sampled nearby
        rng = np.random.default_rng(8)
        m = random_unitary(rng, 2) + 0.05 * (
            rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        )
        p = polar_unitary(m)
        d0 = unitary_distance(m, p)
        for _ in range(25):
            other = polar_unitary(p + 0.1 * random_antihermitian(rng, 2))
            assert d0 <= unitary_distance(m, other) + 1e-12


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_expm_inverse_is_dagger(seed):
    l = random_antihermitian(np.random.default_rng(seed), 2)
    e = expm_antihermitian(l)
    assert unitary_distance(expm_antihermitian(-l), dagger(e)) < 1e-12
