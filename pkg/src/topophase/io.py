"""JSON/TOML file formats and atomic output helpers."""
from __future__ import annotations

import csv
import io as _io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .errors import ParseError
from .majorana import Constellation
from .phase import PhaseReport
from .rotor import RotationPath, path_from_axis_angles
from .spincore import Spin, SpinState, make_state

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib


def _read_json(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from exc
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from exc


def _field(data: dict, key: str, path):
    if not isinstance(data, dict) or key not in data:
        raise ParseError(f"{path}: missing field {key!r}")
    return data[key]


# states

def state_to_dict(state: SpinState) -> dict:
    return {"twice_s": state.twice_s,
            "amplitudes": [[float(a.real), float(a.imag)] for a in state.amplitudes]}


def state_from_dict(data: dict, source="<state>") -> SpinState:
    twice_s = _field(data, "twice_s", source)
    amps = _field(data, "amplitudes", source)
    try:
        spin = Spin(int(twice_s))
        arr = np.array([complex(float(re), float(im)) for re, im in amps])
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{source}: malformed state ({exc})") from exc
    return make_state(spin, arr)


def load_state(path) -> SpinState:
    return state_from_dict(_read_json(path), path)


# constellations

def constellation_to_dict(c: Constellation) -> dict:
    return {"twice_s": c.spin.twice_s,
            "stars": [{"dir": [float(v) for v in d], "mult": int(m)} for d, m in c.stars]}


def constellation_from_dict(data: dict, source="<constellation>") -> Constellation:
    twice_s = _field(data, "twice_s", source)
    stars = _field(data, "stars", source)
    try:
        parsed = []
        for star in stars:
            d = np.array(star["dir"], dtype=float)
            norm = np.linalg.norm(d)
            if abs(norm - 1.0) > 1e-13:  # leave exact unit vectors bit-identical
                d = d / norm
            parsed.append((d, int(star["mult"])))
        return Constellation(Spin(int(twice_s)), parsed)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{source}: malformed constellation ({exc})") from exc


def load_constellation(path) -> Constellation:
    return constellation_from_dict(_read_json(path), path)


def constellation_csv(c: Constellation) -> str:
    rows = [[*d, m] for d, m in c.stars]
    return to_csv(["x", "y", "z", "mult"], rows)


# rotation paths

def path_to_dict(path: RotationPath) -> dict:
    return {"samples": [{"t": float(t), "q": [float(v) for v in q]}
                        for t, q in zip(path.times, path.quats)]}


def path_from_dict(data: dict, source="<path>") -> RotationPath:
    try:
        if isinstance(data, dict) and "samples" in data:
            t = np.array([float(s["t"]) for s in data["samples"]])
            q = np.array([[float(v) for v in s["q"]] for s in data["samples"]])
            if q.ndim != 2 or q.shape[1] != 4:
                raise ValueError("each q needs four components")
            return RotationPath(t, q)
        if isinstance(data, dict) and "aa" in data:
            return path_from_axis_angles(data["aa"])
    except (KeyError, TypeError) as exc:
        raise ParseError(f"{source}: malformed path ({exc})") from exc
    except ValueError as exc:
        raise ParseError(f"{source}: {exc}") from exc
    raise ParseError(f"{source}: path needs a 'samples' or 'aa' field")


def load_path(path) -> RotationPath:
    return path_from_dict(_read_json(path), path)


def phase_report_from_dict(data: dict) -> PhaseReport:
    return PhaseReport(float(data["total"]), float(data["dynamical"]), float(data["geometric"]),
                       int(data["n_samples"]), float(data["richardson_error_estimate"]))


# config

def load_config(path) -> dict:
    path = Path(path)
    try:
        if path.suffix.lower() == ".toml":
            with open(path, "rb") as fh:
                return tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ParseError(f"{path}: invalid TOML ({exc})") from exc
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from exc
    return _read_json(path)


# output

def fmt_float(x) -> str:
    return format(float(x), ".17g")


def to_csv(header, rows) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt_float(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def dumps_json(data) -> str:
    return json.dumps(_plain(data), indent=2, allow_nan=True) + "\n"


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_atomic(path, text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
