"""Closed loops in coordinate space and their holonomies.

A holonomy is computed two independent ways: a path-ordered product of
step exponentials along the loop (works everywhere), and an abelian
surface integral of the curvature over a planar region (valid only when
the two in-plane connection components commute everywhere on the region).
Cross-checking the two routes, plus the Schrodinger oracle in
`adiabatic`, is the core consistency triangle of this package.

Ordering convention: later path points multiply on the left,
Gamma = exp(L_N) ... exp(L_1), matching the time-ordered propagator.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import LoopNotClosed, NonCommutingPlane
from . import _kernel
from .connection import (
    commutator_norm,
    connection_analytic,
    connection_numeric_batch,
    field_strength_numeric_batch,
)
from .manifold import (
    COORDINATES,
    DEFAULT_CONVENTION,
    GrassmannianPoint,
    coordinate_index,
)
from .matrix import expm_antihermitian, unitarity_defect

_CLOSURE_TOL = 1e-12


@dataclass(frozen=True)
class Loop:
    """Piecewise-linear closed path in the 8 coordinates.

    Each segment is a dict of per-coordinate offsets (omitted coordinates
    do not move).  The segment offsets must sum to zero within 1e-12 per
    coordinate; construction refuses anything else.
    """

    base: GrassmannianPoint
    segments: tuple
    steps_per_segment: int

    def __post_init__(self):
        segs = []
        for seg in self.segments:
            for name in seg:
                if name not in COORDINATES:
                    raise ValueError(f"unknown coordinate {name!r} in segment")
            segs.append({k: float(v) for k, v in seg.items()})
        object.__setattr__(self, "segments", tuple(segs))
        if not self.segments:
            raise ValueError("loop needs at least one segment")
        if self.steps_per_segment < 1:
            raise ValueError("steps_per_segment must be >= 1")
        total = self.offsets().sum(axis=0)
        bad = np.abs(total) > _CLOSURE_TOL
        if bad.any():
            names = [COORDINATES[i] for i in np.nonzero(bad)[0]]
            raise LoopNotClosed(
                f"segment offsets do not return to the base point; "
                f"net displacement in {', '.join(names)}")

    # -- geometry ---------------------------------------------------------

    def offsets(self):
        """(n_segments, 8) array of per-segment displacement vectors."""
        offs = np.zeros((len(self.segments), len(COORDINATES)))
        for k, seg in enumerate(self.segments):
            for name, v in seg.items():
                offs[k, coordinate_index(name)] = v
        return offs

    def segment_starts(self):
        offs = self.offsets()
        starts = np.zeros_like(offs)
        starts[1:] = np.cumsum(offs[:-1], axis=0)
        return self.base.to_array()[None, :] + starts

    def positions(self, u):
        """Coordinates at fractional path parameter u in [0, 1].

        Each segment occupies an equal share of the parameter regardless
        of its coordinate length.
        """
        u = np.asarray(u, dtype=np.float64)
        nseg = len(self.segments)
        seg = np.minimum((u * nseg).astype(int), nseg - 1)
        f = u * nseg - seg
        starts = self.segment_starts()
        offs = self.offsets()
        return starts[seg] + f[..., None] * offs[seg]

    def midsteps(self):
        """Midpoints and displacements of the integrator discretization.

        Returns (points (N, 8), steps (N, 8)) with N = n_segments *
        steps_per_segment, ordered along the path.
        """
        n = self.steps_per_segment
        starts = self.segment_starts()
        offs = self.offsets()
        f = (np.arange(n) + 0.5) / n
        pts = (starts[:, None, :] + f[None, :, None] * offs[:, None, :])
        d = np.broadcast_to(offs[:, None, :] / n, pts.shape)
        m = len(self.segments) * n
        return pts.reshape(m, -1), d.reshape(m, -1).copy()

    def reversed(self):
        """The same geometric loop traversed backwards."""
        segs = tuple({k: -v for k, v in seg.items()}
                     for seg in reversed(self.segments))
        return Loop(base=self.base, segments=segs,
                    steps_per_segment=self.steps_per_segment)

    # -- serialization ----------------------------------------------------

    def to_json_dict(self):
        return {
            "base": self.base.to_json_dict(),
            "segments": [dict(seg) for seg in self.segments],
            "steps_per_segment": self.steps_per_segment,
        }

    @classmethod
    def from_json_dict(cls, data):
        extra = set(data) - {"base", "segments", "steps_per_segment"}
        if extra:
            raise ValueError(f"unknown loop keys: {sorted(extra)}")
        return cls(
            base=GrassmannianPoint.from_json_dict(data.get("base", {})),
            segments=tuple(data["segments"]),
            steps_per_segment=int(data.get("steps_per_segment", 1000)),
        )

    @classmethod
    def from_json(cls, text):
        return cls.from_json_dict(json.loads(text))


@dataclass(frozen=True)
class PlanarRegion:
    """Axis-aligned rectangle in one coordinate plane, others held fixed."""

    plane: tuple
    rect: tuple          # ((sigma_lo, sigma_hi), (sigma_prime_lo, sigma_prime_hi))
    fixed: GrassmannianPoint = field(default_factory=GrassmannianPoint)

    def __post_init__(self):
        sigma, sigma_prime = self.plane
        if sigma == sigma_prime:
            raise ValueError("plane needs two distinct coordinates")
        for name in self.plane:
            if name not in COORDINATES:
                raise ValueError(f"unknown coordinate {name!r}")
        (a0, a1), (b0, b1) = self.rect
        if a1 < a0 or b1 < b0:
            raise ValueError("rectangle bounds must be ordered")
        object.__setattr__(self, "plane", (sigma, sigma_prime))
        object.__setattr__(
            self, "rect", ((float(a0), float(a1)), (float(b0), float(b1))))

    def point_at(self, sigma_val, sigma_prime_val):
        p = self.fixed.shifted(self.plane[0],
                               sigma_val - self.fixed.get(self.plane[0]))
        return p.shifted(self.plane[1],
                         sigma_prime_val - p.get(self.plane[1]))

    def area(self):
        (a0, a1), (b0, b1) = self.rect
        return (a1 - a0) * (b1 - b0)


@dataclass(frozen=True)
class HolonomyPair:
    """Holonomies of the two degenerate subspaces; None = not computed."""

    gamma_plus: np.ndarray = None
    gamma_minus: np.ndarray = None

    def get(self, subspace):
        if subspace == "plus":
            return self.gamma_plus
        if subspace == "minus":
            return self.gamma_minus
        raise ValueError(f"subspace must be 'plus' or 'minus', got {subspace!r}")

    def max_unitarity_defect(self):
        ds = [unitarity_defect(g) for g in (self.gamma_plus, self.gamma_minus)
              if g is not None]
        return max(ds) if ds else 0.0


def loop_boundary(region, steps=40000):
    """Counterclockwise rectangle boundary of a planar region as a Loop.

    `steps` is the total step budget; each of the 4 segments gets an equal
    share.
    """
    if steps < 4:
        raise ValueError("steps must be >= 4")
    sigma, sigma_prime = region.plane
    (a0, a1), (b0, b1) = region.rect
    da, db = a1 - a0, b1 - b0
    base = region.point_at(a0, b0)
    segments = (
        {sigma: da},
        {sigma_prime: db},
        {sigma: -da},
        {sigma_prime: -db},
    )
    return Loop(base=base, segments=segments,
                steps_per_segment=max(1, steps // 4))


def _step_exponents(loop, subspace, conv, source):
    """(N, 2, 2) anti-hermitian step exponents L_k along the loop."""
    pts, disp = loop.midsteps()
    ls = np.zeros((pts.shape[0], 2, 2), dtype=complex)
    for ci, name in enumerate(COORDINATES):
        moving = np.abs(disp[:, ci]) > 0.0
        if not moving.any():
            continue
        if source == "numeric":
            blocks = connection_numeric_batch(pts[moving], name, subspace, conv)
        elif source == "analytic":
            blocks = np.stack([
                connection_analytic(GrassmannianPoint.from_array(x), name,
                                    subspace).matrix
                for x in pts[moving]])
        else:
            raise ValueError(f"source must be 'numeric' or 'analytic', got {source!r}")
        ls[moving] += disp[moving, ci][:, None, None] * blocks
    return ls


def holonomy_ordered(loop, subspace="both", conv=DEFAULT_CONVENTION,
                     source="numeric"):
    """Path-ordered holonomy of a closed loop.

    Midpoint product integrator: at each step the connection is sampled at
    the step midpoint, L_k = sum_c A_c dsigma_c, and the step factors
    exp(L_k) are multiplied with later steps on the left.  Discretization
    error is O(1/N^2).

    `source` selects where A comes from: the defining finite-difference
    derivative ('numeric', default) or the closed-form tables
    ('analytic').
    """
    which = ("plus", "minus") if subspace == "both" else (subspace,)
    out = {}
    for s in which:
        ls = _step_exponents(loop, s, conv, source)
        out[s] = _kernel.chain_expm_2x2(ls)
    return HolonomyPair(gamma_plus=out.get("plus"), gamma_minus=out.get("minus"))


_COMMUTATOR_GRID = 5
_COMMUTATOR_TOL = 1e-6


def plane_commutes(region, subspace, conv=DEFAULT_CONVENTION,
                   grid=_COMMUTATOR_GRID):
    """Largest commutator norm of the two in-plane components on a grid."""
    sigma, sigma_prime = region.plane
    (a0, a1), (b0, b1) = region.rect
    worst = 0.0
    for av in np.linspace(a0, a1, grid):
        for bv in np.linspace(b0, b1, grid):
            p = region.point_at(av, bv)
            worst = max(worst, commutator_norm(p, sigma, sigma_prime,
                                               subspace, conv))
    return worst


def holonomy_stokes(region, subspace, conv=DEFAULT_CONVENTION,
                    quad_tol=1e-9):
    """Abelian surface-integral holonomy over a commuting planar region.

    Valid only when the two in-plane connection components commute
    everywhere on the region (checked on a sample grid); then the
    path-ordering collapses and the loop integral equals the surface
    integral of the curvature, exponentiated.
    """
    worst = plane_commutes(region, subspace, conv)
    if worst > _COMMUTATOR_TOL:
        raise NonCommutingPlane(
            f"in-plane connection components do not commute on the region "
            f"(max commutator norm {worst:.3e}); the abelian surface "
            f"integral is invalid here")
    if region.area() == 0.0:
        return np.eye(2, dtype=complex)
    exponent = _surface_integral(region, subspace, conv, quad_tol)
    return expm_antihermitian(exponent)


def _surface_integral(region, subspace, conv, quad_tol):
    """Gauss-Legendre surface integral of the curvature over the region.

    The grid is doubled until the integrated exponent changes by at most
    quad_tol (capped at 128 points per axis; the finite-difference noise in
    the integrand puts a floor near 1e-8 anyway).  The integrand is smooth,
    so the quadrature converges spectrally and the tolerance is normally met
    at the first doubling.
    """
    sigma, sigma_prime = region.plane
    (a0, a1), (b0, b1) = region.rect
    ia = coordinate_index(sigma)
    ib = coordinate_index(sigma_prime)
    fixed = region.fixed.to_array()
    prev = None
    for n in (16, 32, 64, 128):
        x, w = np.polynomial.legendre.leggauss(n)
        av = 0.5 * (a1 - a0) * x + 0.5 * (a1 + a0)
        bv = 0.5 * (b1 - b0) * x + 0.5 * (b1 + b0)
        pts = np.tile(fixed, (n * n, 1))
        pts[:, ia] = np.repeat(av, n)
        pts[:, ib] = np.tile(bv, n)
        fs = field_strength_numeric_batch(
            pts, sigma, sigma_prime, subspace, conv).reshape(n, n, 2, 2)
        ww = np.outer(w, w) * (0.25 * (a1 - a0) * (b1 - b0))
        ex = np.einsum("ab,abij->ij", ww, fs)
        if prev is not None and np.abs(ex - prev).max() <= quad_tol:
            prev = ex
            break
        prev = ex
    return 0.5 * (prev - prev.conj().T)


def berry_phase_stokes(rect):
    """Closed-form surface-integral phases of the two-level baseline.

    For a rectangle [theta_lo, theta_hi] x [phi_lo, phi_hi] the curvature
    +-i sin(2 theta) integrates to phi_pm = +-(phi_hi - phi_lo) *
    (cos 2 theta_lo - cos 2 theta_hi) / 2; returns (phi_plus, phi_minus)
    with phi_plus = -phi_minus exactly.
    """
    (th_lo, th_hi), (ph_lo, ph_hi) = rect
    if th_hi < th_lo or ph_hi < ph_lo:
        raise ValueError("rectangle bounds must be ordered")
    phi = (ph_hi - ph_lo) * (np.cos(2.0 * th_lo) - np.cos(2.0 * th_hi)) / 2.0
    return float(phi), float(-phi)
