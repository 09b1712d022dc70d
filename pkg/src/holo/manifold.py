"""Coordinates and unitaries for the doubly-degenerate four-level family.

The control manifold is parameterized by eight angles: four polar angles
theta13, theta14, theta23, theta24 and four azimuthal angles phi13, phi14,
phi23, phi24. Each pair (i, j) with i in {1,2} and j in {3,4} labels an
elementary two-level rotation between levels i and j, and the full unitary
is the ordered product

    U = U(z13) U(z14) U(z23) U(z24),        z_ij = theta_ij * exp(i phi_ij).

The Hamiltonian is H = U H0 U^dagger with H0 = (omega/2) diag(1, 1, -1, -1),
so levels 1,2 span the upper degenerate subspace ("plus") and levels 3,4 the
lower one ("minus") at every point of the manifold.

The exact matrix form of an elementary rotation is a convention with three
independent binary choices (angle scale, sign of the off-diagonal i, and
which off-diagonal entry carries e^{+i phi}). The package treats the
convention as an explicit value, RotationConvention, everywhere; the verify
module selects the one that matches the closed-form component tables
numerically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np

from .errors import DimensionMismatch, InvalidPair

__all__ = [
    "THETA_COORDS",
    "PHI_COORDS",
    "COORDINATES",
    "PAIRS",
    "coordinate_index",
    "coordinate_kind",
    "coordinate_pair",
    "GrassmannianPoint",
    "RotationConvention",
    "DEFAULT_CONVENTION",
    "all_conventions",
    "elementary_rotation",
    "two_level_rotation",
    "build_unitary",
    "build_two_level",
    "hamiltonian",
]

PAIRS = ("13", "14", "23", "24")
THETA_COORDS = tuple("theta" + p for p in PAIRS)
PHI_COORDS = tuple("phi" + p for p in PAIRS)
# Canonical coordinate order used for every flat array representation.
COORDINATES = THETA_COORDS + PHI_COORDS

_COORD_INDEX = {name: i for i, name in enumerate(COORDINATES)}


def coordinate_index(name: str) -> int:
    """Position of a coordinate name in the canonical order."""
    try:
        return _COORD_INDEX[name]
    except KeyError:
        raise DimensionMismatch(
            f"unknown coordinate {name!r}; expected one of {COORDINATES}"
        ) from None


def coordinate_kind(name: str) -> str:
    """'theta' or 'phi'."""
    coordinate_index(name)
    return "theta" if name.startswith("theta") else "phi"


def coordinate_pair(name: str) -> str:
    """The level pair '13', '14', '23' or '24' of a coordinate."""
    coordinate_index(name)
    return name[-2:]


@dataclass(frozen=True)
class GrassmannianPoint:
    """A point of the eight-dimensional control manifold. Angles in radians."""

    theta13: float = 0.0
    theta14: float = 0.0
    theta23: float = 0.0
    theta24: float = 0.0
    phi13: float = 0.0
    phi14: float = 0.0
    phi23: float = 0.0
    phi24: float = 0.0

    def to_array(self) -> np.ndarray:
        """Coordinates as a flat float array in canonical order."""
        return np.array([getattr(self, c) for c in COORDINATES], dtype=float)

    @classmethod
    def from_array(cls, a) -> "GrassmannianPoint":
        arr = np.asarray(a, dtype=float).reshape(-1)
        if arr.shape[0] != 8:
            raise DimensionMismatch(f"expected 8 coordinates, got {arr.shape[0]}")
        return cls(**{c: float(arr[i]) for i, c in enumerate(COORDINATES)})

    def get(self, name: str) -> float:
        return float(getattr(self, name)) if name in _COORD_INDEX else self._bad(name)

    @staticmethod
    def _bad(name: str):
        raise DimensionMismatch(f"unknown coordinate {name!r}")

    def shifted(self, name: str, delta: float) -> "GrassmannianPoint":
        """New point with one coordinate shifted by delta."""
        return replace(self, **{name: self.get(name) + delta})

    def canonicalize(self) -> "GrassmannianPoint":
        """Fold thetas into [0, pi) and phis into [0, 2 pi).

        The fold changes each elementary rotation by at most a global sign,
        which cancels in the Hamiltonian and in every connection component.
        Never applied implicitly.
        """
        vals = {}
        for c in THETA_COORDS:
            vals[c] = float(np.mod(self.get(c), np.pi))
        for c in PHI_COORDS:
            vals[c] = float(np.mod(self.get(c), 2 * np.pi))
        return GrassmannianPoint(**vals)

    def to_json_dict(self) -> dict:
        return {c: float(getattr(self, c)) for c in COORDINATES}

    @classmethod
    def from_json_dict(cls, d: dict) -> "GrassmannianPoint":
        """Build from a flat mapping; missing coordinates default to 0.0."""
        unknown = set(d) - set(COORDINATES)
        if unknown:
            raise DimensionMismatch(f"unknown coordinate keys {sorted(unknown)}")
        return cls(**{k: float(v) for k, v in d.items()})

    @classmethod
    def from_json(cls, text: str) -> "GrassmannianPoint":
        return cls.from_json_dict(json.loads(text))


_ANGLE_SCALES = ("full", "half")
_OFFDIAG_PHASES = ("plus_i", "minus_i")
_PHASE_ORIENTATIONS = ("e_plus_iphi_upper", "e_minus_iphi_upper")


@dataclass(frozen=True)
class RotationConvention:
    """Exact matrix form of an elementary rotation.

    angle_scale        'full'  -> trig of theta;  'half' -> trig of theta/2
    offdiag_phase      'plus_i' -> off-diagonal carries +i; 'minus_i' -> -i
    phase_orientation  which off-diagonal entry carries e^{+i phi}: the
                       upper-right one ('e_plus_iphi_upper') or the
                       lower-left one ('e_minus_iphi_upper')
    """

    angle_scale: str = "full"
    offdiag_phase: str = "plus_i"
    phase_orientation: str = "e_plus_iphi_upper"

    def __post_init__(self):
        if self.angle_scale not in _ANGLE_SCALES:
            raise DimensionMismatch(f"bad angle_scale {self.angle_scale!r}")
        if self.offdiag_phase not in _OFFDIAG_PHASES:
            raise DimensionMismatch(f"bad offdiag_phase {self.offdiag_phase!r}")
        if self.phase_orientation not in _PHASE_ORIENTATIONS:
            raise DimensionMismatch(
                f"bad phase_orientation {self.phase_orientation!r}"
            )

    def flags(self) -> tuple[bool, bool, bool]:
        """(half_angle, minus_i, conj_phase) booleans for the kernels."""
        return (
            self.angle_scale == "half",
            self.offdiag_phase == "minus_i",
            self.phase_orientation == "e_minus_iphi_upper",
        )

    def spec(self) -> str:
        return f"{self.angle_scale},{self.offdiag_phase},{self.phase_orientation}"

    @classmethod
    def from_spec(cls, text: str) -> "RotationConvention":
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 3:
            raise DimensionMismatch(
                "convention spec must be 'angle_scale,offdiag_phase,phase_orientation'"
            )
        return cls(*parts)

    def to_json_dict(self) -> dict:
        return {
            "angle_scale": self.angle_scale,
            "offdiag_phase": self.offdiag_phase,
            "phase_orientation": self.phase_orientation,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "RotationConvention":
        return cls(
            angle_scale=d["angle_scale"],
            offdiag_phase=d["offdiag_phase"],
            phase_orientation=d["phase_orientation"],
        )


DEFAULT_CONVENTION = RotationConvention()


def all_conventions() -> tuple[RotationConvention, ...]:
    """All eight candidates in a fixed lexicographic order of their specs."""
    out = [
        RotationConvention(a, o, p)
        for a in _ANGLE_SCALES
        for o in _OFFDIAG_PHASES
        for p in _PHASE_ORIENTATIONS
    ]
    out.sort(key=lambda c: c.spec())
    return tuple(out)


def two_level_rotation(
    theta: float, phi: float, conv: RotationConvention = DEFAULT_CONVENTION
) -> np.ndarray:
    """The 2x2 rotation kernel for the given convention.

    For the default convention this is
        [[cos t,            i e^{+i phi} sin t],
         [i e^{-i phi} sin t,            cos t]]
    with t = theta ('full') or theta/2 ('half'); 'minus_i' flips the sign of
    both off-diagonal entries, 'e_minus_iphi_upper' conjugates both phases.
    """
    half, minus_i, conj_phase = conv.flags()
    t = 0.5 * theta if half else theta
    c = np.cos(t)
    s = np.sin(t)
    j = -1j if minus_i else 1j
    ph = np.exp((-1j if conj_phase else 1j) * phi)
    return np.array([[c, j * ph * s], [j * np.conj(ph) * s, c]], dtype=complex)


def elementary_rotation(
    i: int,
    j: int,
    theta: float,
    phi: float,
    conv: RotationConvention = DEFAULT_CONVENTION,
) -> np.ndarray:
    """4x4 unitary rotating levels i and j (1-based), identity elsewhere.

    Only pairs with i in {1,2} and j in {3,4} are part of the
    parameterization; anything else raises InvalidPair.
    """
    if i not in (1, 2) or j not in (3, 4):
        raise InvalidPair(f"pair ({i},{j}) not in {{1,2}} x {{3,4}}")
    v = two_level_rotation(theta, phi, conv)
    u = np.eye(4, dtype=complex)
    a, b = i - 1, j - 1
    u[a, a] = v[0, 0]
    u[a, b] = v[0, 1]
    u[b, a] = v[1, 0]
    u[b, b] = v[1, 1]
    return u


def build_unitary(
    point: GrassmannianPoint, conv: RotationConvention = DEFAULT_CONVENTION
) -> np.ndarray:
    """Full 4x4 unitary U = U(z13) U(z14) U(z23) U(z24) at a point."""
    u = elementary_rotation(1, 3, point.theta13, point.phi13, conv)
    u = u @ elementary_rotation(1, 4, point.theta14, point.phi14, conv)
    u = u @ elementary_rotation(2, 3, point.theta23, point.phi23, conv)
    u = u @ elementary_rotation(2, 4, point.theta24, point.phi24, conv)
    return u


def build_two_level(theta: float, phi: float) -> np.ndarray:
    """The half-angle two-level unitary used by the abelian baseline:

        [[cos(theta/2),              i e^{+i phi} sin(theta/2)],
         [i e^{-i phi} sin(theta/2),             cos(theta/2)]]
    """
    return two_level_rotation(
        theta, phi, RotationConvention("half", "plus_i", "e_plus_iphi_upper")
    )


def hamiltonian(
    point: GrassmannianPoint,
    omega: float = 1.0,
    conv: RotationConvention = DEFAULT_CONVENTION,
) -> np.ndarray:
    """H = U H0 U^dagger with H0 = (omega/2) diag(1, 1, -1, -1).

    The spectrum is {+omega/2, -omega/2}, each doubly degenerate, at every
    point.
    """
    if not omega > 0:
        raise DimensionMismatch(f"omega must be positive, got {omega}")
    u = build_unitary(point, conv)
    h0 = np.diag([0.5 * omega, 0.5 * omega, -0.5 * omega, -0.5 * omega]).astype(
        complex
    )
    return u @ h0 @ u.conj().T
