"""Command-line front end.

    holo <connection|field|holonomy|verify|adiabatic> [flags]

Exit codes: 0 success, 1 conformance failure, 2 usage or parse error,
3 pole of an analytic formula, 4 bad loop, 5 non-commuting plane.

All angles are radians.  Complex matrix entries appear in JSON as [re, im]
pairs.  `--convention auto` resolves the rotation convention with the
seeded search and caches the result next to the output (or in the working
directory) so later calls reuse it.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .adiabatic import TwoLevelLoop, convergence_study, evolve_two_level, rows_to_csv
from .connection import connection_analytic, connection_numeric_batch, field_strength
from .errors import (
    DimensionMismatch,
    HoloError,
    LoopNotClosed,
    NonCommutingPlane,
    NotTabulated,
    PoleAtPoint,
)
from .holonomy import (
    Loop,
    PlanarRegion,
    holonomy_ordered,
    holonomy_stokes,
    loop_boundary,
)
from .manifold import (
    COORDINATES,
    DEFAULT_CONVENTION,
    GrassmannianPoint,
    RotationConvention,
)
from .matrix import unitarity_defect
from .verify import convention_search, run_conformance

EXIT_OK = 0
EXIT_CONFORMANCE = 1
EXIT_USAGE = 2
EXIT_POLE = 3
EXIT_BAD_LOOP = 4
EXIT_NON_COMMUTING = 5

DEFAULT_SEED = 42

_CONVENTION_CACHE = ".holo-convention.json"


def _seed() -> int:
    env = os.environ.get("HOLO_SEED")
    if env is None:
        return DEFAULT_SEED
    try:
        return int(env)
    except ValueError:
        raise DimensionMismatch(f"HOLO_SEED must be an integer, got {env!r}")


def _resolve_convention(text: str, out_path: str | None, seed: int) -> RotationConvention:
    if text != "auto":
        return RotationConvention.from_spec(text)
    cache_dir = Path(out_path).resolve().parent if out_path else Path.cwd()
    cache = cache_dir / _CONVENTION_CACHE
    if cache.is_file():
        try:
            data = json.loads(cache.read_text())
            if data.get("seed") == seed:
                return RotationConvention.from_spec(data["convention"])
        except (ValueError, KeyError):
            pass  # unreadable cache: redo the search and rewrite it
    found = convention_search(seed=seed)
    cache.write_text(json.dumps({
        "convention": found.convention.spec(),
        "seed": seed,
        "margin": found.margin,
    }, sort_keys=True, indent=2) + "\n")
    return found.convention


def _complex_pairs(m: np.ndarray):
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m)]


def _matrix_csv_row(label: str, subspace: str, method: str, m: np.ndarray) -> str:
    flat = ",".join(f"{z.real:.12g},{z.imag:.12g}" for z in np.asarray(m).ravel())
    return f"{label},{subspace},{method},{flat}"


_MATRIX_CSV_HEADER = (
    "coord_or_pair,subspace,method,re11,im11,re12,im12,re21,im21,re22,im22"
)


def _matrix_text(m: np.ndarray) -> str:
    rows = []
    for row in np.asarray(m):
        rows.append("  [" + "  ".join(f"{z.real:+.9f}{z.imag:+.9f}j" for z in row) + "]")
    return "\n".join(rows)


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _read_point(path: str) -> GrassmannianPoint:
    return GrassmannianPoint.from_json(Path(path).read_text())


def _read_loop(path: str) -> Loop:
    return Loop.from_json(Path(path).read_text())


# -- connection / field ---------------------------------------------------


def _numeric_block(point, coord, subspace, conv):
    return connection_numeric_batch(point.to_array()[None, :], coord, subspace, conv)[0]


def cmd_connection(args) -> int:
    point = _read_point(args.point)
    conv = _resolve_convention(args.convention, args.out, _seed())
    blocks = {}
    if args.method in ("numeric", "both"):
        blocks["numeric"] = _numeric_block(point, args.coord, args.subspace, conv)
    if args.method in ("analytic", "both"):
        blocks["analytic"] = connection_analytic(point, args.coord, args.subspace).matrix
    payload = {
        "coord": args.coord,
        "subspace": args.subspace,
        "blocks": {k: _complex_pairs(v) for k, v in blocks.items()},
        "antihermiticity": {
            k: float(np.abs(v + v.conj().T).max()) for k, v in blocks.items()
        },
    }
    if len(blocks) == 2:
        payload["residual"] = float(
            np.abs(blocks["numeric"] - blocks["analytic"]).max())
    if args.output == "json":
        _emit(json.dumps(payload, sort_keys=True, indent=2) + "\n", args.out)
    elif args.output == "csv":
        lines = [_MATRIX_CSV_HEADER]
        for k, v in blocks.items():
            lines.append(_matrix_csv_row(args.coord, args.subspace, k, v))
        _emit("\n".join(lines) + "\n", args.out)
    else:
        parts = []
        for k, v in blocks.items():
            parts.append(f"A_{args.coord} [{args.subspace}] ({k}):")
            parts.append(_matrix_text(v))
            parts.append(f"  anti-hermiticity residual: {payload['antihermiticity'][k]:.3e}")
        if "residual" in payload:
            parts.append(f"numeric vs analytic: {payload['residual']:.3e}")
        _emit("\n".join(parts) + "\n", args.out)
    return EXIT_OK


def cmd_field(args) -> int:
    point = _read_point(args.point)
    conv = _resolve_convention(args.convention, args.out, _seed())
    blocks = {}
    for method in ("numeric", "analytic"):
        if args.method in (method, "both"):
            blocks[method] = field_strength(
                point, args.mu, args.nu, args.subspace, conv, method=method).matrix
    payload = {
        "mu": args.mu,
        "nu": args.nu,
        "subspace": args.subspace,
        "blocks": {k: _complex_pairs(v) for k, v in blocks.items()},
    }
    if len(blocks) == 2:
        payload["residual"] = float(
            np.abs(blocks["numeric"] - blocks["analytic"]).max())
    if args.output == "json":
        _emit(json.dumps(payload, sort_keys=True, indent=2) + "\n", args.out)
    elif args.output == "csv":
        lines = [_MATRIX_CSV_HEADER]
        pair = f"{args.mu}/{args.nu}"
        for k, v in blocks.items():
            lines.append(_matrix_csv_row(pair, args.subspace, k, v))
        _emit("\n".join(lines) + "\n", args.out)
    else:
        parts = []
        for k, v in blocks.items():
            parts.append(f"F_{args.mu},{args.nu} [{args.subspace}] ({k}):")
            parts.append(_matrix_text(v))
        if "residual" in payload:
            parts.append(f"numeric vs analytic: {payload['residual']:.3e}")
        _emit("\n".join(parts) + "\n", args.out)
    return EXIT_OK


# -- holonomy -------------------------------------------------------------


def _region_from_loop(loop: Loop) -> PlanarRegion:
    """Recover the planar rectangle a 4-segment boundary loop traces."""
    offs = loop.offsets()
    moving = [tuple(np.nonzero(row)[0]) for row in offs]
    if len(loop.segments) != 4 or any(len(m) != 1 for m in moving):
        raise LoopNotClosed(
            "stokes needs a rectangle boundary: 4 segments, each moving "
            "exactly one coordinate")
    ia, ib = moving[0][0], moving[1][0]
    if not (moving[2][0] == ia and moving[3][0] == ib and ia != ib):
        raise LoopNotClosed(
            "stokes needs a rectangle boundary with segment pattern "
            "sigma, sigma', -sigma, -sigma'")
    da, db = offs[0][ia], offs[1][ib]
    if da <= 0 or db <= 0 or offs[2][ia] != -da or offs[3][ib] != -db:
        raise LoopNotClosed(
            "stokes needs a counterclockwise rectangle boundary (positive "
            "forward offsets, matching returns)")
    base = loop.base.to_array()
    return PlanarRegion(
        plane=(COORDINATES[ia], COORDINATES[ib]),
        rect=((base[ia], base[ia] + da), (base[ib], base[ib] + db)),
        fixed=loop.base,
    )


def cmd_holonomy(args) -> int:
    loop = _read_loop(args.loop)
    if args.steps is not None:
        loop = Loop(base=loop.base, segments=loop.segments,
                    steps_per_segment=max(1, args.steps // len(loop.segments)))
    conv = _resolve_convention(args.convention, args.out, _seed())
    subspaces = ("plus", "minus") if args.subspace == "both" else (args.subspace,)
    results = {}
    if args.method in ("ordered", "both"):
        pair = holonomy_ordered(loop, args.subspace, conv)
        for s in subspaces:
            results.setdefault(s, {})["ordered"] = pair.get(s)
    if args.method in ("stokes", "both"):
        region = _region_from_loop(loop)
        for s in subspaces:
            results.setdefault(s, {})["stokes"] = holonomy_stokes(region, s, conv)
    payload = {}
    for s, methods in results.items():
        entry = {
            k: {"matrix": _complex_pairs(v),
                "unitarity_defect": unitarity_defect(v)}
            for k, v in methods.items()
        }
        if len(methods) == 2:
            entry["ordered_vs_stokes"] = float(
                np.abs(methods["ordered"] - methods["stokes"]).max())
        payload[s] = entry
    if args.output == "json":
        _emit(json.dumps(payload, sort_keys=True, indent=2) + "\n", args.out)
    elif args.output == "csv":
        lines = [_MATRIX_CSV_HEADER]
        for s, methods in results.items():
            for k in ("ordered", "stokes"):
                if k in methods:
                    lines.append(_matrix_csv_row(f"gamma_{s}", s, k, methods[k]))
        _emit("\n".join(lines) + "\n", args.out)
    else:
        parts = []
        for s, methods in results.items():
            for k in ("ordered", "stokes"):
                if k in methods:
                    parts.append(f"gamma_{s} ({k}):")
                    parts.append(_matrix_text(methods[k]))
                    parts.append(
                        f"  unitarity defect: {unitarity_defect(methods[k]):.3e}")
            if "ordered_vs_stokes" in payload[s]:
                parts.append(
                    f"  ordered vs stokes: {payload[s]['ordered_vs_stokes']:.3e}")
        _emit("\n".join(parts) + "\n", args.out)
    return EXIT_OK


# -- verify ---------------------------------------------------------------


def cmd_verify(args) -> int:
    seed = args.seed if args.seed is not None else _seed()
    if args.samples < 20:
        sys.stderr.write("samples must be >= 20\n")
        return EXIT_USAGE
    conv = _resolve_convention(args.convention, args.report_prefix, seed)
    report = run_conformance(
        conv,
        samples=args.samples,
        seed=seed,
        tol_connection=args.tol_connection,
        tol_field=args.tol_field,
    )
    prefix = Path(args.report_prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    json_path = prefix.with_suffix(".json")
    text_path = prefix.with_suffix(".txt")
    json_path.write_text(report.to_json())
    text_path.write_text(report.to_text())
    npass = sum(f.passed for f in report.formulas)
    structural_ok = (
        report.structural["antihermitian_max"] <= 1e-8
        and report.structural["antisymmetry_exact"]
        and report.structural["zero_connection_blocks_max"] <= 1e-7
        and report.structural["zero_field_components_max"] <= 1e-6
        and report.structural["commuting_pairs_max"] <= 1e-7
    )
    ok = structural_ok and report.all_pass()
    sys.stdout.write(
        f"{npass}/{len(report.formulas)} formulas pass; structural "
        f"{'pass' if structural_ok else 'FAIL'}; reports: {json_path}, {text_path}\n"
    )
    return EXIT_OK if ok else EXIT_CONFORMANCE


# -- adiabatic ------------------------------------------------------------


def _parse_times(text: str):
    try:
        times = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise DimensionMismatch(f"bad --times value {text!r}")
    if not times:
        raise DimensionMismatch("--times must list at least one value")
    return times


def cmd_adiabatic(args) -> int:
    times = _parse_times(args.times)
    conv = _resolve_convention(args.convention, args.out, _seed())
    if args.two_level:
        loop = TwoLevelLoop.from_json(Path(args.loop).read_text())
        rows = []
        for t in times:
            steps = max(100, int(round(args.steps_per_unit_time * args.omega * t)))
            r = evolve_two_level(loop, args.omega, t, steps, conv, args.profile)
            rows.append({"T": t, "steps": steps, "leakage": r.leakage,
                         "phi_plus": r.phi_plus, "phi_minus": r.phi_minus})
        if args.output == "json":
            _emit(json.dumps(rows, sort_keys=True, indent=2) + "\n", args.out)
        elif args.output == "csv":
            lines = ["T,steps,leakage,phi_plus,phi_minus"]
            for r in rows:
                lines.append(
                    f"{r['T']:.10g},{r['steps']},{r['leakage']:.10g},"
                    f"{r['phi_plus']:.10g},{r['phi_minus']:.10g}")
            _emit("\n".join(lines) + "\n", args.out)
        else:
            parts = [
                f"T={r['T']:g}: phi+ = {r['phi_plus']:+.9f}, "
                f"phi- = {r['phi_minus']:+.9f}, leakage {r['leakage']:.3e}"
                for r in rows
            ]
            _emit("\n".join(parts) + "\n", args.out)
        return EXIT_OK
    loop = _read_loop(args.loop)
    rows = convergence_study(
        loop, args.omega, times, conv,
        steps_per_unit_time=args.steps_per_unit_time,
        profile=args.profile,
    )
    if args.output == "json":
        _emit(json.dumps(rows, sort_keys=True, indent=2) + "\n", args.out)
    else:
        # the pinned CSV is the primary format; text mode shows the same table
        _emit(rows_to_csv(rows), args.out)
    return EXIT_OK


# -- parser ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="holo",
        description="Geometric phases of a doubly-degenerate four-level "
                    "system: connections, curvatures, holonomies, and an "
                    "adiabatic Schrodinger oracle.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--convention", default="auto",
                        help="'auto' or 'angle_scale,offdiag_phase,phase_orientation'")
        sp.add_argument("--output", choices=("json", "csv", "text"), default="text")
        sp.add_argument("--out", default=None, help="write to file instead of stdout")

    sp = sub.add_parser("connection", help="evaluate one connection block at a point")
    sp.add_argument("--point", required=True, help="point JSON file")
    sp.add_argument("--coord", required=True, choices=COORDINATES)
    sp.add_argument("--subspace", required=True, choices=("plus", "minus"))
    sp.add_argument("--method", choices=("numeric", "analytic", "both"),
                    default="numeric")
    common(sp)
    sp.set_defaults(fn=cmd_connection)

    sp = sub.add_parser("field", help="evaluate one field-strength component at a point")
    sp.add_argument("--point", required=True)
    sp.add_argument("--mu", required=True, choices=COORDINATES)
    sp.add_argument("--nu", required=True, choices=COORDINATES)
    sp.add_argument("--subspace", required=True, choices=("plus", "minus"))
    sp.add_argument("--method", choices=("numeric", "analytic", "both"),
                    default="numeric")
    common(sp)
    sp.set_defaults(fn=cmd_field)

    sp = sub.add_parser("holonomy", help="holonomy pair of a closed loop")
    sp.add_argument("--loop", required=True, help="loop JSON file")
    sp.add_argument("--method", choices=("ordered", "stokes", "both"),
                    default="ordered")
    sp.add_argument("--subspace", choices=("plus", "minus", "both"), default="both")
    sp.add_argument("--steps", type=int, default=None,
                    help="total steps for the ordered integrator")
    common(sp)
    sp.set_defaults(fn=cmd_holonomy)

    sp = sub.add_parser("verify", help="conformance report of the formula tables")
    sp.add_argument("--samples", type=int, default=200)
    sp.add_argument("--seed", type=int, default=None,
                    help="default: HOLO_SEED or 42")
    sp.add_argument("--tol-connection", type=float, default=1e-6)
    sp.add_argument("--tol-field", type=float, default=1e-5)
    sp.add_argument("--report-prefix", default="report",
                    help="writes <prefix>.json and <prefix>.txt")
    common(sp)
    sp.set_defaults(fn=cmd_verify)

    sp = sub.add_parser("adiabatic", help="adiabatic convergence study on a loop")
    sp.add_argument("--loop", required=True)
    sp.add_argument("--omega", type=float, default=1.0)
    sp.add_argument("--times", required=True,
                    help="comma-separated totals, units 1/omega")
    sp.add_argument("--steps-per-unit-time", type=float, default=200.0)
    sp.add_argument("--profile", choices=("uniform", "smoothstep"),
                    default="smoothstep")
    sp.add_argument("--two-level", action="store_true",
                    help="run the abelian two-level baseline")
    common(sp)
    sp.set_defaults(fn=cmd_adiabatic)
    return p


_ERROR_CODES = (
    (PoleAtPoint, EXIT_POLE),
    (LoopNotClosed, EXIT_BAD_LOOP),
    (NonCommutingPlane, EXIT_NON_COMMUTING),
    (NotTabulated, EXIT_USAGE),
    (DimensionMismatch, EXIT_USAGE),
)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except tuple(e for e, _ in _ERROR_CODES) as err:
        for etype, code in _ERROR_CODES:
            if isinstance(err, etype):
                sys.stderr.write(f"error: {err}\n")
                return code
        raise AssertionError("unreachable")
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as err:
        sys.stderr.write(f"error: {err}\n")
        return EXIT_USAGE
    except HoloError as err:
        sys.stderr.write(f"error: {err}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
