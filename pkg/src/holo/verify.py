"""Conformance engine: select the rotation convention that matches the
transcribed connection tables, then diff every transcribed formula against
the finite-difference oracle and emit a deterministic report.

Ground truth is always the numeric oracle built from the definitions; the
transcriptions are the objects under audit.  Failures are never patched in
place: each failing formula is reported with the minimal member of the
{negate, conjugate, subspace-swap} transformation group that repairs it, or
with repair null when none does (an open erratum).
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .connection import (
    CONNECTION_FORMULA_KEYS,
    FIELD_FORMULA_KEYS,
    ZERO_CLAIM_KEYS,
    commutator_norm,
    connection_analytic,
    connection_numeric_batch,
    field_strength,
    field_strength_numeric_batch,
)
from .errors import NonCommutingPlane, NotTabulated
from .holonomy import holonomy_ordered, holonomy_stokes, loop_boundary, plane_commutes
from .manifold import (
    DEFAULT_CONVENTION,
    GrassmannianPoint,
    RotationConvention,
    all_conventions,
)
from .matrix import unitary_distance

__all__ = [
    "ConventionSearchResult",
    "FormulaResult",
    "ConformanceReport",
    "sample_points",
    "convention_search",
    "run_conformance",
    "stokes_triangle",
]

DEFAULT_SEED = 42
POLE_MARGIN = 0.1  # radians kept clear of every tan/cot singularity

TOL_CONNECTION = 1e-6
TOL_FIELD = 1e-5
COMMUTATOR_TOL = 1e-7

# transformations tried on a failing analytic formula, by generator count;
# within each count the order is fixed so "minimal repair" is deterministic
_REPAIRS = (
    ("negate",),
    ("conjugate",),
    ("swap",),
    ("negate", "conjugate"),
    ("negate", "swap"),
    ("conjugate", "swap"),
    ("negate", "conjugate", "swap"),
)

_OTHER = {"plus": "minus", "minus": "plus"}


def sample_points(samples: int, seed: int, margin: float = POLE_MARGIN) -> np.ndarray:
    """(samples, 8) coordinate draws avoiding the analytic poles.

    Angles stay in [margin, pi/2 - margin], keeping every tan and cot
    argument at least `margin` from a singularity; phases are free.
    """
    rng = np.random.default_rng(seed)
    thetas = rng.uniform(margin, np.pi / 2 - margin, size=(samples, 4))
    phis = rng.uniform(0.0, 2.0 * np.pi, size=(samples, 4))
    return np.concatenate([thetas, phis], axis=1)


def _analytic_connection_stack(pts: np.ndarray, coord: str, subspace: str) -> np.ndarray:
    out = np.empty((pts.shape[0], 2, 2), dtype=complex)
    for i, row in enumerate(pts):
        out[i] = connection_analytic(GrassmannianPoint.from_array(row), coord, subspace).matrix
    return out


def _analytic_field_stack(pts: np.ndarray, mu: str, nu: str, subspace: str) -> np.ndarray:
    out = np.empty((pts.shape[0], 2, 2), dtype=complex)
    for i, row in enumerate(pts):
        out[i] = field_strength(
            GrassmannianPoint.from_array(row), mu, nu, subspace, method="analytic"
        ).matrix
    return out


_SEARCH_TRIM = 2  # worst block residuals dropped from each candidate's score

_GAUGE_NOTE = (
    "the offdiag_phase flag is a gauge copy: flipping the off-diagonal +-i "
    "equals shifting every phase coordinate by pi, i.e. conjugating U by "
    "diag(i, i, -i, -i), which acts as a scalar on each subspace and leaves "
    "every connection block, field strength, and holonomy bit-identical; "
    "the margin is therefore taken over the four gauge-inequivalent classes"
)


def _gauge_class(conv: RotationConvention) -> tuple:
    return (conv.angle_scale, conv.phase_orientation)


@dataclass(frozen=True)
class ConventionSearchResult:
    convention: RotationConvention
    table: tuple  # ({"convention", "total_residual", "trimmed_residual"}, ...)
    margin: float  # runner-up gauge class score / winning class score
    gauge_note: str = _GAUGE_NOTE

    def best_total(self) -> float:
        spec = self.convention.spec()
        return next(r["trimmed_residual"] for r in self.table if r["convention"] == spec)


def convention_search(samples: int = 40, seed: int = DEFAULT_SEED) -> ConventionSearchResult:
    """Pick the rotation convention the formula tables were written in.

    Evaluates all 8 candidates at `samples` pole-avoiding points.  A
    candidate's score sums, over the 16 connection blocks, the largest
    elementwise deviation between its numeric connection and the analytic
    table, after dropping each candidate's two worst blocks: one printed
    block carries a transcription defect of order one (an open erratum in
    the conformance report), and without the trim that single formula
    dominates every total and produces near-ties between wrong candidates.
    A right convention still has 10+ clean order-one mismatches under every
    wrong candidate, so the trim costs no discrimination.

    Two of the three flags are decisive; the offdiag_phase flag is a pure
    gauge redundancy (see gauge_note on the result), so candidates tie on it
    exactly and the reported margin compares gauge-inequivalent classes.
    Within a tie the lexicographically first spec is returned.
    """
    if samples < 20:
        raise ValueError(f"need at least 20 samples, got {samples}")
    pts = sample_points(samples, seed)
    analytic = {
        key: _analytic_connection_stack(pts, *key) for key in CONNECTION_FORMULA_KEYS
    }
    candidates = sorted(all_conventions(), key=lambda c: c.spec())
    table = []
    best = None
    class_scores: dict = {}
    for conv in candidates:
        residuals = []
        for coord, subspace in CONNECTION_FORMULA_KEYS:
            num = connection_numeric_batch(pts, coord, subspace, conv)
            residuals.append(float(np.abs(num - analytic[(coord, subspace)]).max()))
        trimmed = float(np.sum(sorted(residuals)[:-_SEARCH_TRIM]))
        table.append({
            "convention": conv.spec(),
            "total_residual": float(np.sum(residuals)),
            "trimmed_residual": trimmed,
        })
        cls = _gauge_class(conv)
        class_scores[cls] = min(class_scores.get(cls, np.inf), trimmed)
        if best is None or trimmed < best[1]:
            best = (conv, trimmed)
    ranked = sorted(class_scores.values())
    margin = ranked[1] / ranked[0] if ranked[0] > 0 else float("inf")
    return ConventionSearchResult(convention=best[0], table=tuple(table), margin=margin)


@dataclass(frozen=True)
class FormulaResult:
    id: str
    max_residual: float
    passed: bool
    repair: str | None  # None: passed as printed, or no repair exists


@dataclass(frozen=True)
class ConformanceReport:
    convention: RotationConvention
    seed: int
    samples: int
    tol_connection: float
    tol_field: float
    formulas: tuple  # FormulaResult, fixed order: 16 A, 25 F, zero claims
    structural: dict

    def failures(self):
        return tuple(f for f in self.formulas if not f.passed)

    def all_pass(self) -> bool:
        return all(f.passed for f in self.formulas)

    def to_json(self) -> str:
        payload = {
            "convention": asdict(self.convention),
            "seed": self.seed,
            "samples": self.samples,
            "formulas": [
                {
                    "id": f.id,
                    "max_residual": f.max_residual,
                    "pass": f.passed,
                    "repair": f.repair,
                }
                for f in self.formulas
            ],
            "structural": self.structural,
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"

    def to_text(self) -> str:
        lines = [
            f"convention: {self.convention.spec()}",
            f"samples: {self.samples}  seed: {self.seed}  "
            f"tol A: {self.tol_connection:g}  tol F: {self.tol_field:g}",
            "",
            f"{'formula':<28} {'max residual':>13}  {'status':<6} repair",
        ]
        for f in self.formulas:
            status = "pass" if f.passed else "FAIL"
            lines.append(
                f"{f.id:<28} {f.max_residual:>13.3e}  {status:<6} {f.repair or '-'}"
            )
        lines.append("")
        for k in sorted(self.structural):
            lines.append(f"structural {k}: {self.structural[k]}")
        npass = sum(f.passed for f in self.formulas)
        lines.append("")
        lines.append(f"{npass}/{len(self.formulas)} formulas pass as printed")
        return "\n".join(lines) + "\n"


def _connection_id(coord: str, subspace: str) -> str:
    return f"A{'+' if subspace == 'plus' else '-'}_{coord}"


def _field_id(mu: str, nu: str, subspace: str) -> str:
    return f"F{'+' if subspace == 'plus' else '-'}_{mu}_{nu}"


def _apply_repair(analytic_by_key, key, names):
    """Transformed analytic stack for one formula, or None if inapplicable."""
    mu_nu, subspace = key[:-1], key[-1]
    if "swap" in names:
        other = mu_nu + (_OTHER[subspace],)
        if other not in analytic_by_key:
            return None  # counterpart not tabulated; swap cannot apply
        val = analytic_by_key[other]
    else:
        val = analytic_by_key[key]
    if "conjugate" in names:
        val = np.conj(val)
    if "negate" in names:
        val = -val
    return val


def _audit(keys, analytic_by_key, numeric_by_key, tol, id_fn):
    results = []
    for key in keys:
        num = numeric_by_key[key]
        residual = float(np.abs(analytic_by_key[key] - num).max())
        passed = residual <= tol
        repair = None
        if not passed:
            for names in _REPAIRS:
                cand = _apply_repair(analytic_by_key, key, names)
                if cand is None:
                    continue
                if float(np.abs(cand - num).max()) <= tol:
                    repair = "+".join(names)
                    break
        results.append(FormulaResult(
            id=id_fn(*key), max_residual=residual, passed=passed, repair=repair,
        ))
    return results


def run_conformance(
    conv: RotationConvention = DEFAULT_CONVENTION,
    samples: int = 200,
    seed: int = DEFAULT_SEED,
    tol_connection: float = TOL_CONNECTION,
    tol_field: float = TOL_FIELD,
) -> ConformanceReport:
    """Diff all 42 transcribed formula lines against the numeric oracle.

    The inventory: 16 connection blocks, 25 tabulated field-strength
    components (several printed as zero), and the printed standalone claim
    that the minus-subspace (theta14, theta13) component vanishes, which is
    at odds with the tabulated nonzero (theta13, theta14) entry and is
    therefore scored as its own line.
    """
    if samples < 20:
        raise ValueError(f"need at least 20 samples, got {samples}")
    if not (tol_connection > 0 and tol_field > 0):
        raise ValueError("tolerances must be positive")
    pts = sample_points(samples, seed)

    a_analytic = {k: _analytic_connection_stack(pts, *k) for k in CONNECTION_FORMULA_KEYS}
    a_numeric = {k: connection_numeric_batch(pts, k[0], k[1], conv) for k in CONNECTION_FORMULA_KEYS}
    f_analytic = {k: _analytic_field_stack(pts, *k) for k in FIELD_FORMULA_KEYS}
    f_numeric = {k: field_strength_numeric_batch(pts, k[0], k[1], k[2], conv) for k in FIELD_FORMULA_KEYS}

    formulas = _audit(CONNECTION_FORMULA_KEYS, a_analytic, a_numeric, tol_connection, _connection_id)
    formulas += _audit(FIELD_FORMULA_KEYS, f_analytic, f_numeric, tol_field, _field_id)

    # standalone zero claims, printed in the order (later, earlier); the
    # numeric oracle for F_{nu mu} is minus the canonical F_{mu nu}
    for nu, mu, subspace in ZERO_CLAIM_KEYS:
        num = f_numeric.get((mu, nu, subspace))
        if num is None:
            num = field_strength_numeric_batch(pts, mu, nu, subspace, conv)
        residual = float(np.abs(num).max())
        formulas.append(FormulaResult(
            id=_field_id(nu, mu, subspace),
            max_residual=residual,
            passed=residual <= tol_field,
            repair=None,
        ))

    zero_a = [k for k in CONNECTION_FORMULA_KEYS
              if float(np.abs(a_analytic[k]).max()) == 0.0]
    zero_f = [k for k in FIELD_FORMULA_KEYS
              if float(np.abs(f_analytic[k]).max()) == 0.0]
    comm_pts = pts[: min(len(pts), 25)]
    structural = {
        "antihermitian_max": max(
            float(np.abs(v + np.conj(np.transpose(v, (0, 2, 1)))).max())
            for v in a_numeric.values()
        ),
        "antisymmetry_exact": all(
            np.array_equal(
                field_strength_numeric_batch(pts[:5], k[1], k[0], k[2], conv),
                -f_numeric[k][:5],
            )
            for k in FIELD_FORMULA_KEYS[:4]
        ),
        "zero_connection_blocks_max": max(
            float(np.abs(a_numeric[k]).max()) for k in zero_a
        ),
        "zero_field_components_max": max(
            float(np.abs(f_numeric[k]).max()) for k in zero_f
        ),
        "commuting_pairs_max": max(
            commutator_norm(GrassmannianPoint.from_array(row), mu, nu, s, conv)
            for mu, nu, s in FIELD_FORMULA_KEYS
            for row in comm_pts[:5]
        ),
        "two_level_kernel_note": (
            "the printed half-angle two-level matrix yields A+_phi = "
            "-i sin^2(theta/2); no rotation convention reproduces the claimed "
            "+-i sin^2(theta) from it, while the selected full-angle kernel "
            "gives -i sin^2(theta), consistent with the four-level tables up "
            "to the overall sign discussed in the holonomy comparisons"
        ),
    }
    return ConformanceReport(
        convention=conv,
        seed=seed,
        samples=samples,
        tol_connection=tol_connection,
        tol_field=tol_field,
        formulas=tuple(formulas),
        structural=structural,
    )


def stokes_triangle(region, conv: RotationConvention = DEFAULT_CONVENTION, steps: int = 40000):
    """Ordered-vs-Stokes residual for each subspace whose plane commutes.

    Returns {subspace: {"residual": float} | {"skipped": reason}}; raises
    NonCommutingPlane when neither subspace admits the Stokes route.
    """
    loop = loop_boundary(region, steps=steps)
    out = {}
    valid = 0
    for subspace in ("plus", "minus"):
        comm = plane_commutes(region, subspace, conv)
        if comm > 1e-6:
            out[subspace] = {"skipped": f"max commutator {comm:.3e} exceeds 1e-06"}
            continue
        valid += 1
        ordered = holonomy_ordered(loop, subspace, conv).get(subspace)
        stokes = holonomy_stokes(region, subspace, conv)
        out[subspace] = {"residual": unitary_distance(ordered, stokes)}
    if valid == 0:
        raise NonCommutingPlane(
            f"no subspace of plane {region.plane} passes the commutator check"
        )
    return out
