"""Built-in anticoherent and reference states.

Platonic states are built from exact vertex coordinates through their
constellations; m = 0 and GHZ states are written down in the S_z basis.
"""
from __future__ import annotations

import itertools
import math

import numpy as np

from .majorana import Constellation, constellation_to_state
from .spincore import Spin, SpinState, basis_state, make_state

GOLDEN = (1 + math.sqrt(5)) / 2


def _normalize_rows(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v, axis=1)[:, None]


def _cyclic(v) -> list:
    x, y, z = v
    return [(x, y, z), (z, x, y), (y, z, x)]


def tetrahedron_vertices() -> np.ndarray:
    """One vertex at the north pole, the other three at z = -1/3."""
    r = 2 * math.sqrt(2) / 3
    pts = [(0.0, 0.0, 1.0)]
    for k in range(3):
        phi = 2 * math.pi * k / 3
        pts.append((r * math.cos(phi), r * math.sin(phi), -1.0 / 3))
    return _normalize_rows(pts)


def octahedron_vertices() -> np.ndarray:
    return np.vstack([np.eye(3), -np.eye(3)])


def cube_vertices() -> np.ndarray:
    return _normalize_rows(list(itertools.product((1, -1), repeat=3)))


def icosahedron_vertices() -> np.ndarray:
    pts = []
    for a, b in itertools.product((1, -1), repeat=2):
        pts.extend(_cyclic((0.0, a, b * GOLDEN)))
    return _normalize_rows(pts)


def dodecahedron_vertices() -> np.ndarray:
    pts = [p for p in itertools.product((1, -1), repeat=3)]
    for a, b in itertools.product((1, -1), repeat=2):
        pts.extend(_cyclic((0.0, a / GOLDEN, b * GOLDEN)))
    return _normalize_rows(pts)


def _platonic(vertices: np.ndarray) -> SpinState:
    spin = Spin(len(vertices))
    return constellation_to_state(Constellation(spin, [(v, 1) for v in vertices]))


def tetrahedral_state() -> SpinState:
    return _platonic(tetrahedron_vertices())


def tetrahedral_state_amplitudes() -> SpinState:
    """(1, 0, 0, sqrt 2, 0)/sqrt 3 written directly in the S_z basis."""
    return make_state(Spin(4), [1, 0, 0, math.sqrt(2), 0])


def octahedral_state() -> SpinState:
    return _platonic(octahedron_vertices())


def cube_state() -> SpinState:
    return _platonic(cube_vertices())


def icosahedral_state() -> SpinState:
    return _platonic(icosahedron_vertices())


def dodecahedral_state() -> SpinState:
    return _platonic(dodecahedron_vertices())


def m0_state(s) -> SpinState:
    return basis_state(Spin.of(s), 0)


def ghz_state(s) -> SpinState:
    spin = Spin.of(s)
    amps = np.zeros(spin.dim, dtype=complex)
    amps[0] = amps[-1] = 1.0
    return make_state(spin, amps)


def coherent_state(s, direction=(0.0, 0.0, 1.0)) -> SpinState:
    spin = Spin.of(s)
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    return constellation_to_state(Constellation(spin, [(d, spin.twice_s)]))


BUILTIN = {
    "tetrahedron": tetrahedral_state,
    "cube": cube_state,
    "octahedron": octahedral_state,
    "dodecahedron": dodecahedral_state,
    "icosahedron": icosahedral_state,
    **{f"m0-s{s}": (lambda s=s: m0_state(s)) for s in (1, 2, 3)},
    **{f"ghz-s{s}": (lambda s=s: ghz_state(s)) for s in (1, 2, 3)},
}


def builtin_state(name: str) -> SpinState:
    try:
        return BUILTIN[name]()
    except KeyError:
        raise KeyError(f"unknown built-in state {name!r}; choose from {sorted(BUILTIN)}") from None
