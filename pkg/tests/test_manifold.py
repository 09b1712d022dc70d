"""Coordinates, rotation conventions, and the frame unitary."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from holo.errors import DimensionMismatch, InvalidPair
from holo.manifold import (
    COORDINATES,
    DEFAULT_CONVENTION,
    GrassmannianPoint,
    RotationConvention,
    all_conventions,
    build_two_level,
    build_unitary,
    coordinate_index,
    coordinate_kind,
    coordinate_pair,
    elementary_rotation,
    hamiltonian,
    two_level_rotation,
)
from holo.matrix import unitarity_defect

angles = st.floats(-10.0, 10.0, allow_nan=False)


def test_coordinate_order_is_thetas_then_phis():
    assert COORDINATES == (
        "theta13", "theta14", "theta23", "theta24",
        "phi13", "phi14", "phi23", "phi24",
    )
    for i, name in enumerate(COORDINATES):
        assert coordinate_index(name) == i
    assert coordinate_kind("phi23") == "phi"
    assert coordinate_pair("theta14") == "14"
    with pytest.raises(DimensionMismatch):
        coordinate_index("theta12")


class TestGrassmannianPoint:
    def test_array_round_trip(self):
        a = np.arange(8, dtype=float)
        p = GrassmannianPoint.from_array(a)
        assert np.array_equal(p.to_array(), a)
        assert p.get("phi13") == 4.0

    def test_shifted_moves_one_coordinate(self):
        p = GrassmannianPoint(theta23=0.5)
        q = p.shifted("theta23", 0.25)
        assert q.theta23 == 0.75
        assert q.to_array()[[0, 1, 3, 4, 5, 6, 7]].tolist() == [0.0] * 7

    def test_canonicalize_preserves_hamiltonian(self):
        p = GrassmannianPoint(theta13=-2.7, theta24=4.0, phi14=-1.0, phi23=9.0)
        q = p.canonicalize()
        arr = q.to_array()
        assert (arr[:4] >= 0).all() and (arr[:4] < np.pi).all()
        assert (arr[4:] >= 0).all() and (arr[4:] < 2 * np.pi).all()
        assert np.allclose(hamiltonian(p), hamiltonian(q), atol=1e-12)

    def test_json_round_trip_and_defaults(self):
        p = GrassmannianPoint(theta14=1.0, phi24=2.0)
        assert GrassmannianPoint.from_json_dict(p.to_json_dict()) == p
        sparse = GrassmannianPoint.from_json_dict({"phi24": 2.0})
        assert sparse.phi24 == 2.0 and sparse.theta13 == 0.0

    def test_unknown_json_key_rejected(self):
        with pytest.raises(DimensionMismatch):
            GrassmannianPoint.from_json_dict({"theta13": 0.0, "alpha": 1.0})


class TestRotationConvention:
    def test_default_is_full_angle_plus_i(self):
        assert DEFAULT_CONVENTION.spec() == "full,plus_i,e_plus_iphi_upper"
        assert DEFAULT_CONVENTION.flags() == (False, False, False)

    def test_spec_round_trip_all_eight(self):
        convs = all_conventions()
        assert len(convs) == 8 and len(set(convs)) == 8
        specs = [c.spec() for c in convs]
        assert specs == sorted(specs)
        for c in convs:
            assert RotationConvention.from_spec(c.spec()) == c
            assert RotationConvention.from_json_dict(c.to_json_dict()) == c

    def test_bad_field_values_rejected(self):
        with pytest.raises(DimensionMismatch):
            RotationConvention(angle_scale="double")
        with pytest.raises(DimensionMismatch):
            RotationConvention.from_spec("full,plus_i")


class TestRotations:
    def test_default_form_is_explicit(self):
        th, ph = 0.7, 1.1
        expected = np.array([
            [np.cos(th), 1j * np.exp(1j * ph) * np.sin(th)],
            [1j * np.exp(-1j * ph) * np.sin(th), np.cos(th)],
        ])
        assert np.allclose(two_level_rotation(th, ph), expected, atol=1e-15)

    def test_flags_change_the_matrix_as_documented(self):
        th, ph = 0.7, 1.1
        base = two_level_rotation(th, ph)
        half = two_level_rotation(th, ph, RotationConvention(angle_scale="half"))
        assert np.allclose(half, two_level_rotation(th / 2, ph), atol=1e-15)
        minus = two_level_rotation(th, ph, RotationConvention(offdiag_phase="minus_i"))
        assert np.allclose(minus[0, 1], -base[0, 1], atol=1e-15)
        flipped = two_level_rotation(
            th, ph, RotationConvention(phase_orientation="e_minus_iphi_upper"))
        assert np.allclose(flipped, two_level_rotation(th, -ph), atol=1e-15)

    def test_build_two_level_uses_half_angle(self):
        th, ph = 0.9, 0.4
        m = build_two_level(th, ph)
        assert m[0, 0] == pytest.approx(np.cos(th / 2))
        assert m[0, 1] == pytest.approx(1j * np.exp(1j * ph) * np.sin(th / 2))

    def test_elementary_rotation_embeds_at_the_right_levels(self):
        u = elementary_rotation(2, 3, 0.5, 0.3)
        v = two_level_rotation(0.5, 0.3)
        assert u[1, 1] == v[0, 0] and u[1, 2] == v[0, 1]
        assert u[2, 1] == v[1, 0] and u[2, 2] == v[1, 1]
        assert u[0, 0] == 1.0 and u[3, 3] == 1.0
        assert u[0, 1] == 0.0 and u[1, 3] == 0.0

    def test_only_upper_lower_pairs_allowed(self):
        for i, j in ((1, 2), (3, 4), (3, 1), (0, 3)):
            with pytest.raises(InvalidPair):
                elementary_rotation(i, j, 0.1, 0.1)


@settings(max_examples=60, deadline=None)
@given(st.lists(angles, min_size=8, max_size=8),
       st.sampled_from(range(8)))
def test_build_unitary_is_unitary(coords, conv_idx):
    p = GrassmannianPoint.from_array(np.array(coords))
    u = build_unitary(p, all_conventions()[conv_idx])
    assert unitarity_defect(u) < 1e-12


def test_build_unitary_is_the_ordered_product(generic_point):
    p = generic_point
    expected = (
        elementary_rotation(1, 3, p.theta13, p.phi13)
        @ elementary_rotation(1, 4, p.theta14, p.phi14)
        @ elementary_rotation(2, 3, p.theta23, p.phi23)
        @ elementary_rotation(2, 4, p.theta24, p.phi24)
    )
    assert np.array_equal(build_unitary(p), expected)


def test_build_unitary_at_origin_is_identity():
    assert np.array_equal(build_unitary(GrassmannianPoint()), np.eye(4))


class TestHamiltonian:
    def test_spectrum_is_doubly_degenerate_everywhere(self, generic_point):
        for omega in (1.0, 2.5):
            h = hamiltonian(generic_point, omega)
            assert np.allclose(h, h.conj().T, atol=1e-14)
            ev = np.linalg.eigvalsh(h)
            assert np.allclose(
                ev, [-omega / 2, -omega / 2, omega / 2, omega / 2], atol=1e-12)

    def test_frame_diagonalizes(self, generic_point):
        u = build_unitary(generic_point)
        h = hamiltonian(generic_point, 2.0)
        assert np.allclose(
            u.conj().T @ h @ u, np.diag([1.0, 1.0, -1.0, -1.0]), atol=1e-12)

    def test_omega_must_be_positive(self):
        with pytest.raises(DimensionMismatch):
            hamiltonian(GrassmannianPoint(), omega=0.0)
