"""Command-line interface.

Exit codes: 0 ok, 2 parse error, 3 degenerate input, 4 undefined phase,
5 not a symmetry, 6 undersampled path.
"""
from __future__ import annotations

import argparse
import math
import sys
import warnings

import numpy as np

from . import __version__, catalog
from . import io as fio
from .errors import ParseError, TopoPhaseError
from .majorana import state_to_constellation
from .noiselab import RNG_ALGORITHM, NoiseConfig, endpoint_error_study, homotopy_invariance_suite
from .phase import geometric_phase
from .rotor import from_axis_angle, resample_path
from .spincore import anticoherence_order
from .table import phase_table
from .topo import (CellDecomposition, detect_symmetry_group, group_ball_points,
                   homotopy_class, identity_cell_boundary, lift_group, phase_representation,
                   predicted_phase)


def manifest(args, inputs, parameters, seed=None) -> dict:
    return {"command": args.command, "inputs": [str(p) for p in inputs],
            "parameters": parameters, "tool_version": __version__, "seed": seed}


def load_state_arg(ref: str):
    if ref.startswith("builtin:"):
        try:
            return catalog.builtin_state(ref.split(":", 1)[1])
        except KeyError as exc:
            raise ParseError(str(exc.args[0])) from None
    return fio.load_state(ref)


def emit(args, text: str, out: str | None = None):
    target = out if out is not None else args.out
    if target:
        fio.write_atomic(target, text)
    else:
        sys.stdout.write(text)


def emit_json(args, data: dict, man: dict):
    emit(args, fio.dumps_json({**data, "manifest": man}))


def emit_csv(args, text: str, man: dict, out: str | None = None):
    target = out if out is not None else args.out
    emit(args, text, target)
    if target:
        fio.write_atomic(str(target) + ".manifest.json", fio.dumps_json(man))


def _axis_angle_rows(rotors) -> list:
    rows = []
    for r in rotors:
        axis, angle = r.axis_angle()
        rows.append([*axis.tolist(), angle])
    return rows


def svg_orthographic(constellation, size: int = 240) -> str:
    """Top view (x, y) of the stars; filled dots on the upper hemisphere."""
    c = size / 2
    rad = size / 2 - 12
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}">',
             f'<circle cx="{c}" cy="{c}" r="{rad}" fill="none" stroke="black"/>']
    for d, m in constellation.stars:
        x, y = c + rad * d[0], c - rad * d[1]
        fill = "black" if d[2] >= 0 else "white"
        parts.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="{3 + 2 * m}" fill="{fill}" stroke="black"/>')
        if m > 1:
            parts.append(f'<text x="{x + 8:.3f}" y="{y - 8:.3f}" font-size="10">{m}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def cmd_constellation(args) -> int:
    psi = load_state_arg(args.state)
    c = state_to_constellation(psi)
    man = manifest(args, [args.state], {"format": args.format})
    if args.format == "csv":
        emit_csv(args, fio.constellation_csv(c), man)
    else:
        emit_json(args, fio.constellation_to_dict(c), man)
    if args.svg:
        fio.write_atomic(args.svg, svg_orthographic(c))
    return 0


def cmd_phase_table(args) -> int:
    samples = None if args.samples == 0 else args.samples
    rows = phase_table(samples)
    man = manifest(args, [], {"samples": samples, "format": args.format})
    header = ["state", "order", "abs_phase_over_pi", "reference_over_pi",
              "stargazing_over_pi", "path_abs_phase_over_pi", "n_rotations"]
    table = []
    for r in rows:
        path = r.path_abs_phase / math.pi if r.path_abs_phase is not None else ""
        table.append([r.state, r.order, r.abs_phase / math.pi, r.reference_abs_phase / math.pi,
                      r.stargazing_abs_phase / math.pi, path, r.n_rotations])
    if args.format == "json":
        emit_json(args, {"rows": [dict(zip(header, row)) for row in table]}, man)
    else:
        emit_csv(args, fio.to_csv(header, table), man)
    return 0


def cmd_phase_path(args) -> int:
    psi = load_state_arg(args.state)
    path = fio.load_path(args.path)
    if args.samples:
        path = resample_path(path, args.samples)
    report = geometric_phase(path, psi)
    man = manifest(args, [args.state, args.path], {"samples": args.samples})
    emit_json(args, report.as_dict(), man)
    return 0


def cmd_symmetry(args) -> int:
    psi = load_state_arg(args.state)
    group = detect_symmetry_group(state_to_constellation(psi), args.tol)
    data = {
        "schoenflies_tag": group.schoenflies_tag,
        "order": group.order,
        "binary_order": 2 * group.order,
        "elements_axis_angle": _axis_angle_rows(group.elements),
        "elements_quaternion": [r.as_array().tolist() for r in group.elements],
        "anticoherence_order": anticoherence_order(psi),
    }
    if group.axis is not None:
        data["continuous_axis"] = group.axis.tolist()
    emit_json(args, data, manifest(args, [args.state], {"tol": args.tol}))
    return 0


def cmd_homotopy(args) -> int:
    psi = load_state_arg(args.state)
    path = fio.load_path(args.path)
    group = detect_symmetry_group(state_to_constellation(psi), args.tol)
    bg = lift_group(group)
    cls = homotopy_class(path, bg)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rep = phase_representation(psi, bg)
    q = cls.representative
    axis, angle = q.axis_angle()
    data = {
        "class_index": bg.index_of(q),
        "class_quaternion": q.as_array().tolist(),
        "class_axis_angle": [*axis.tolist(), angle],
        "predicted_phase": predicted_phase(cls, rep),
        "geometric_phase": geometric_phase(path, psi).geometric,
        "binary_order": bg.order,
    }
    emit_json(args, data, manifest(args, [args.state, args.path], {"tol": args.tol}))
    return 0


def _noise_config(args) -> tuple[NoiseConfig, dict]:
    cfg = fio.load_config(args.config) if args.config else {}
    for key, value in (("seed", args.seed), ("n_trials", args.trials),
                       ("n_samples", args.samples), ("epsilon", args.epsilon),
                       ("n_modes", args.modes)):
        if value is not None:
            cfg[key] = value
    if args.epsilon_list:
        cfg["epsilons"] = [float(v) for v in args.epsilon_list.split(",")]
    if "seed" not in cfg:
        raise ParseError("noise-study needs --seed (or 'seed' in the config file)")
    extra = {k: cfg.pop(k) for k in ("state", "rotation", "mode") if k in cfg}
    try:
        config = NoiseConfig(**cfg)
    except TypeError as exc:
        raise ParseError(f"bad noise config: {exc}") from None
    return config, extra


def cmd_noise_study(args) -> int:
    config, extra = _noise_config(args)
    state_ref = args.state or extra.get("state", "builtin:tetrahedron")
    psi = load_state_arg(state_ref)
    mode = args.mode or extra.get("mode", "endpoint")
    params = {"config": config.__dict__, "mode": mode, "rng": RNG_ALGORITHM}
    if mode == "invariance":
        group = detect_symmetry_group(state_to_constellation(psi))
        summary = homotopy_invariance_suite(psi, group, config)
        emit_json(args, summary.as_dict(), manifest(args, [state_ref], params, config.seed))
        return 0
    rotation = args.rotation or extra.get("rotation")
    if rotation is None:
        r = from_axis_angle([0.0, 0.0, 1.0], 2 * math.pi / 3)
    else:
        vals = [float(v) for v in (rotation.split(",") if isinstance(rotation, str) else rotation)]
        r = from_axis_angle(np.array(vals[:3]) / np.linalg.norm(vals[:3]), vals[3])
    params["rotation"] = [*r.axis_angle()[0].tolist(), r.axis_angle()[1]]
    report = endpoint_error_study(psi, r, config)
    man = manifest(args, [state_ref], params, config.seed)
    emit_json(args, report.as_dict(), man)
    trials_out = args.trials_csv or (f"{args.out}.trials.csv" if args.out else None)
    if trials_out:
        header = list(report.trials[0].keys()) if report.trials else []
        rows = [list(t.values()) for t in report.trials]
        emit_csv(args, fio.to_csv(header, rows), man, trials_out)
    return 0


def cmd_cells(args) -> int:
    psi = load_state_arg(args.state)
    group = detect_symmetry_group(state_to_constellation(psi), args.tol)
    cells = CellDecomposition(group)
    man = manifest(args, [args.state], {"tol": args.tol, "directions": args.directions})
    prefix = args.out or "cells"
    ball = group_ball_points(group)
    emit_csv(args, fio.to_csv(["x", "y", "z"], ball.tolist()), man, f"{prefix}_group.csv")
    if args.emit_ball:
        boundary = identity_cell_boundary(cells, args.directions)
        emit_csv(args, fio.to_csv(["x", "y", "z"], boundary.tolist()), man,
                 f"{prefix}_identity_cell.csv")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="topophase", description="Geometric phases of rotated spin states.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, fmt=None):
        sp.add_argument("--out", help="output file (default: standard output)")
        if fmt:
            sp.add_argument("--format", choices=["json", "csv"], default=fmt)
        return sp

    sp = common(sub.add_parser("constellation", help="stars of a state"), "json")
    sp.add_argument("state", help="state JSON file or builtin:<name>")
    sp.add_argument("--svg", help="also write an orthographic SVG view")
    sp.set_defaults(func=cmd_constellation)

    sp = common(sub.add_parser("phase-table", help="symmetry phases of the reference states"), "csv")
    sp.add_argument("--samples", type=int, default=2000,
                    help="path samples for the integrated check (0 to skip)")
    sp.set_defaults(func=cmd_phase_table)

    sp = common(sub.add_parser("phase-path", help="phases of a state along a rotation path"))
    sp.add_argument("state")
    sp.add_argument("path", help="path JSON file")
    sp.add_argument("--samples", type=int, help="resample the path to N samples")
    sp.set_defaults(func=cmd_phase_path)

    sp = common(sub.add_parser("symmetry", help="rotational symmetry group of a state"))
    sp.add_argument("state")
    sp.add_argument("--tol", type=float, default=1e-7)
    sp.set_defaults(func=cmd_symmetry)

    sp = common(sub.add_parser("homotopy", help="homotopy class and predicted phase of a path"))
    sp.add_argument("state")
    sp.add_argument("path")
    sp.add_argument("--tol", type=float, default=1e-7)
    sp.set_defaults(func=cmd_homotopy)

    sp = common(sub.add_parser("noise-study", help="Monte Carlo robustness studies"))
    sp.add_argument("--config", help="JSON or TOML file with NoiseConfig fields")
    sp.add_argument("--state", help="state JSON file or builtin:<name>")
    sp.add_argument("--rotation", help="nx,ny,nz,angle of the symmetry rotation")
    sp.add_argument("--mode", choices=["endpoint", "invariance"])
    sp.add_argument("--epsilon", type=float)
    sp.add_argument("--epsilon-list", help="comma-separated epsilons")
    sp.add_argument("--trials", type=int)
    sp.add_argument("--modes", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--samples", type=int)
    sp.add_argument("--trials-csv", help="raw trial CSV (default: <out>.trials.csv)")
    sp.set_defaults(func=cmd_noise_study)

    sp = sub.add_parser("cells", help="group point cloud and identity-cell boundary")
    sp.add_argument("state")
    sp.add_argument("--out", help="output prefix (default: cells)")
    sp.add_argument("--emit-ball", action="store_true", help="also sample the identity cell boundary")
    sp.add_argument("--directions", type=int, default=2000)
    sp.add_argument("--tol", type=float, default=1e-7)
    sp.set_defaults(func=cmd_cells)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TopoPhaseError as exc:
        print(f"topophase {args.command}: {exc}", file=sys.stderr)
        return exc.exit_code
    except (KeyError, ValueError) as exc:
        print(f"topophase {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
