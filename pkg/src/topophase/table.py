"""Geometric phases of symmetry rotations for the reference states.

Each row pairs a state with a rotation order n; the rotations used are the
2pi/n rotations about n-fold axes of the detected symmetry group.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import catalog
from .majorana import state_to_constellation
from .phase import geometric_phase, phase_distance, stargazing_phase, symmetry_eigenphase, wrap_phase
from .rotor import geodesic_path
from .topo import detect_symmetry_group, primitive_rotations

PI = math.pi

# (label, state factory, {order: reference phase})
REFERENCE_ROWS = [
    *[(f"spin {s}, m=0", (lambda s=s: catalog.m0_state(s)), {2: s * PI}) for s in (1, 2, 3)],
    *[(f"spin {s}, GHZ", (lambda s=s: catalog.ghz_state(s)), {2 * s: PI}) for s in (1, 2, 3)],
    ("Tetrahedron", catalog.tetrahedral_state, {2: 0.0, 3: 2 * PI / 3}),
    ("Cube", catalog.cube_state, {2: 0.0, 3: 0.0, 4: 0.0}),
    ("Octahedron", catalog.octahedral_state, {2: PI, 3: 0.0, 4: PI}),
    ("Dodecahedron", catalog.dodecahedral_state, {2: 0.0, 3: 0.0, 5: 0.0}),
    ("Icosahedron", catalog.icosahedral_state, {2: 0.0, 3: 0.0, 5: 0.0}),
]


@dataclass
class TableRow:
    state: str
    order: int
    n_rotations: int
    abs_phase: float
    reference_abs_phase: float
    eigen_spread: float
    stargazing_abs_phase: float
    path_abs_phase: float | None = None
    path_max_deviation: float | None = None

    @property
    def abs_phase_over_pi(self) -> float:
        return self.abs_phase / PI


def phase_table(samples: int | None = 2000) -> list[TableRow]:
    """Recompute every reference entry; ``samples=None`` skips the path integrals."""
    rows = []
    for label, factory, columns in REFERENCE_ROWS:
        psi = factory()
        constellation = state_to_constellation(psi)
        group = detect_symmetry_group(constellation)
        for order, ref in columns.items():
            rotations = primitive_rotations(group, order)
            if not rotations:
                raise RuntimeError(f"{label}: no rotation of order {order} found")
            alphas = np.array([symmetry_eigenphase(psi, r) for r in rotations])
            mags = np.abs(alphas)
            stars = []
            for r in rotations:
                axis, angle = r.axis_angle()
                stars.append(stargazing_phase(constellation, axis, angle))
            row = TableRow(
                state=label, order=order, n_rotations=len(rotations),
                abs_phase=float(mags[0]),
                reference_abs_phase=float(abs(wrap_phase(ref))),
                eigen_spread=float(np.ptp(mags)),
                stargazing_abs_phase=float(abs(stars[0])),
            )
            if samples:
                geos = np.array([geometric_phase(geodesic_path(r, samples), psi).geometric
                                 for r in rotations])
                row.path_abs_phase = float(abs(geos[0]))
                row.path_max_deviation = float(np.max(phase_distance(geos, alphas)))
            rows.append(row)
    return rows
