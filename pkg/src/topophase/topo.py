"""Symmetry groups of constellations, their SU(2) lifts, and the orbit-space topology.

The orbit of a state with rotational symmetry group G is SO(3)/G, with R ~ R R_m.
Homotopy classes of loops in it are labelled by the endpoint of the lifted
SU(2) path, which lies in the binary group G^C.
"""
from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import NotAGroup, NotASymmetry, NotClosedInOrbitSpace, UndersampledPath
from .majorana import Constellation, is_symmetry, state_to_constellation
from .rotor import (RotationPath, Rotor, canonical_sign, from_axis_angle, lift_path,
                    quat_angle, quat_conj, quat_exp, quat_multiply, wigner_d_many)
from .spincore import SpinState, anticoherence_order

DETECT_TOL = 1e-7
CLOSURE_TOL = 1e-9
TIE_TOL = 1e-9
INTERFACE = -1
AXIAL = "axial-continuous"


def _canonical_rows(q: np.ndarray) -> np.ndarray:
    return np.array([canonical_sign(row) for row in np.atleast_2d(q)])


def _find(quats: np.ndarray, q: np.ndarray, tol: float, mod_sign: bool) -> int:
    d = np.linalg.norm(quats - q, axis=1)
    if mod_sign:
        d = np.minimum(d, np.linalg.norm(quats + q, axis=1))
    k = int(np.argmin(d))
    return k if d[k] <= tol else -1


@dataclass(frozen=True, eq=False)
class PointGroup:
    """Rotations modulo sign, each stored with its canonical sign."""

    elements: list
    schoenflies_tag: str
    axis: np.ndarray | None = None  # the continuous axis of axial groups

    @property
    def quats(self) -> np.ndarray:
        return np.array([e.as_array() for e in self.elements])

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def is_axial(self) -> bool:
        return self.schoenflies_tag == AXIAL

    def index_of(self, r: Rotor, tol: float = CLOSURE_TOL) -> int:
        return _find(self.quats, r.as_array(), tol, mod_sign=True)


@dataclass(frozen=True, eq=False)
class BinaryGroup:
    elements: list

    @property
    def quats(self) -> np.ndarray:
        return np.array([e.as_array() for e in self.elements])

    @property
    def order(self) -> int:
        return len(self.elements)

    def index_of(self, r: Rotor, tol: float = CLOSURE_TOL) -> int:
        return _find(self.quats, r.as_array(), tol, mod_sign=False)

    def product_table(self, tol: float = CLOSURE_TOL) -> np.ndarray:
        """table[i, j] = index of elements[i] * elements[j]; raises NotAGroup if not closed."""
        q = self.quats
        prod = quat_multiply(q[:, None, :], q[None, :, :])
        dist = np.linalg.norm(prod[:, :, None, :] - q[None, None, :, :], axis=-1)
        idx = np.argmin(dist, axis=-1)
        best = np.take_along_axis(dist, idx[..., None], axis=-1)[..., 0]
        if np.max(best) > tol:
            raise NotAGroup(f"product leaves the set by {np.max(best):.3e}")
        return idx


@dataclass(frozen=True)
class HomotopyClass:
    representative: Rotor
    group: BinaryGroup = field(repr=False)


@dataclass(frozen=True, eq=False)
class CellDecomposition:
    """Nearest-symmetry-rotation cells; cell m collects rotations closest to elements[m]."""

    group: PointGroup


@dataclass(frozen=True, eq=False)
class ProjectedPath:
    times: np.ndarray
    representatives: np.ndarray  # (N, 4) rotors g(t) R_m^-1, canonical sign
    cells: np.ndarray
    crossings: list  # [(sample index, t, from cell, to cell)]


# symmetry detection

def _dedup_axes(axes: np.ndarray, tol: float = 1e-6) -> np.ndarray:
    kept: list[np.ndarray] = []
    for a in axes:
        if kept:
            k = np.array(kept)
            if np.min(np.minimum(np.linalg.norm(k - a, axis=1),
                                 np.linalg.norm(k + a, axis=1))) < tol:
                continue
        kept.append(a)
    return np.array(kept)


def _candidate_axes(dirs: np.ndarray) -> np.ndarray:
    cands = [d for d in dirs]
    n = len(dirs)
    for i, j in itertools.combinations(range(n), 2):
        cands.append(dirs[i] + dirs[j])
        cands.append(np.cross(dirs[i], dirs[j]))
    for i, j, k in itertools.combinations(range(n), 3):
        cands.append(dirs[i] + dirs[j] + dirs[k])
    cands = np.array(cands)
    norms = np.linalg.norm(cands, axis=1)
    cands = cands[norms > 1e-6] / norms[norms > 1e-6, None]
    return _dedup_axes(cands)


def _perpendicular(a: np.ndarray) -> np.ndarray:
    e = np.eye(3)[int(np.argmin(np.abs(a)))]
    v = np.cross(a, e)
    return v / np.linalg.norm(v)


def _classify(quats: np.ndarray) -> str:
    n = len(quats)
    if n == 1:
        return "C1"
    axis_orders: list[tuple[np.ndarray, int]] = []
    for q in quats:
        ang = float(quat_angle(q))
        if ang < 1e-9:
            continue
        ax = canonical_sign(q[1:] / np.linalg.norm(q[1:]))
        order = int(round(2 * math.pi / ang))
        for i, (b, o) in enumerate(axis_orders):
            if np.linalg.norm(b - ax) < 1e-6:
                axis_orders[i] = (b, max(o, order))
                break
        else:
            axis_orders.append((ax, order))
    max_order = max(o for _, o in axis_orders)
    if len(axis_orders) == 1:
        return f"C{n}"
    if n == 12 and max_order == 3:
        return "T"
    if n == 24 and max_order == 4:
        return "O"
    if n == 60 and max_order == 5:
        return "I"
    return f"D{n // 2}"


def _close_group(quats: list[np.ndarray], constellation: Constellation, tol: float):
    """Add missing products (each re-verified as a symmetry) until closed."""
    elems = [canonical_sign(q) for q in quats]
    changed = True
    while changed:
        changed = False
        arr = np.array(elems)
        prods = quat_multiply(arr[:, None, :], arr[None, :, :]).reshape(-1, 4)
        for p in prods:
            if _find(np.array(elems), p, 1e-6, mod_sign=True) < 0:
                r = Rotor.from_array(canonical_sign(p / np.linalg.norm(p)))
                if not is_symmetry(constellation, r, 10 * tol):
                    raise NotAGroup("detected rotations do not close under composition")
                elems.append(r.as_array())
                changed = True
    return elems


def _sort_elements(quats: list[np.ndarray]) -> list[np.ndarray]:
    """Identity first, then by rotation angle and axis, for deterministic tables."""
    def key(q):
        return (round(float(quat_angle(q)), 9), tuple(np.round(-q[1:], 9)))
    return sorted(quats, key=key)


def detect_symmetry_group(constellation: Constellation, tol: float = DETECT_TOL) -> PointGroup:
    """Rotational symmetry group of a star multiset."""
    dirs = constellation.directions
    ident = np.array([1.0, 0.0, 0.0, 0.0])
    if len(dirs) == 0:
        return PointGroup([Rotor.identity()], "C1")

    a = dirs[0]
    on_line = np.minimum(np.linalg.norm(dirs - a, axis=1), np.linalg.norm(dirs + a, axis=1)) <= tol
    if np.all(on_line):
        elems = [Rotor.identity()]
        flip = from_axis_angle(_perpendicular(a), math.pi)
        if len(dirs) == 2 and is_symmetry(constellation, flip, tol):
            elems.append(flip.canonical())
        return PointGroup(elems, AXIAL, axis=a.copy())

    mults = constellation.multiplicities
    found = [ident]
    for u in _candidate_axes(dirs):
        heights = dirs @ u
        off = np.nonzero(np.abs(np.abs(heights) - 1.0) > tol**2 / 2 + 1e-15)[0]
        off = [i for i in off if np.linalg.norm(np.cross(dirs[i], u)) > tol]
        if not off:
            continue
        i0 = off[0]
        e1 = dirs[i0] - heights[i0] * u
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(u, e1)
        for j in off:
            if j == i0 or mults[j] != mults[i0] or abs(heights[j] - heights[i0]) > tol:
                continue
            angle = math.atan2(dirs[j] @ e2, dirs[j] @ e1)
            r = from_axis_angle(u, angle)
            if is_symmetry(constellation, r, tol):
                q = canonical_sign(r.as_array())
                if _find(np.array(found), q, 1e-6, mod_sign=True) < 0:
                    found.append(q)
    elems = _sort_elements(_close_group(found, constellation, tol))
    tag = _classify(np.array(elems))
    return PointGroup([Rotor.from_array(q) for q in elems], tag)


def primitive_rotations(group: PointGroup, order: int) -> list[Rotor]:
    """Rotations by 2pi/order about axes whose full rotation order is exactly ``order``."""
    quats = group.quats
    out = []
    for q in quats:
        ang = float(quat_angle(q))
        if abs(ang - 2 * math.pi / order) > 1e-7:
            continue
        ax = q[1:] / np.linalg.norm(q[1:])
        axis_order = 1
        for p in quats:
            pa = float(quat_angle(p))
            if pa < 1e-9:
                continue
            pax = p[1:] / np.linalg.norm(p[1:])
            if min(np.linalg.norm(pax - ax), np.linalg.norm(pax + ax)) < 1e-6:
                axis_order = max(axis_order, int(round(2 * math.pi / pa)))
        if axis_order == order:
            out.append(Rotor.from_array(q))
    return out


def lift_group(g: PointGroup, tol: float = CLOSURE_TOL) -> BinaryGroup:
    elems = []
    for r in g.elements:
        elems.append(r)
        elems.append(-r)
    bg = BinaryGroup(elems)
    bg.product_table(tol)
    return bg


# cells and orbit-space projection

def cell_distances(quats: np.ndarray, cells: CellDecomposition) -> np.ndarray:
    """(N, |G|) relative angles between each rotor and each symmetry rotation."""
    q = np.atleast_2d(quats)
    g = cells.group.quats
    return quat_angle(quat_multiply(q[:, None, :], quat_conj(g)[None, :, :]))


def _assign_rows(dist: np.ndarray, tie_tol: float) -> np.ndarray:
    order = np.argsort(dist, axis=1)
    best = order[:, 0]
    if dist.shape[1] > 1:
        first = np.take_along_axis(dist, order[:, :1], axis=1)[:, 0]
        second = np.take_along_axis(dist, order[:, 1:2], axis=1)[:, 0]
        best = np.where(second - first < tie_tol, INTERFACE, best)
    return best


def cell_assign(g: Rotor, cells: CellDecomposition, tie_tol: float = TIE_TOL) -> int:
    """Index of the nearest symmetry rotation, or INTERFACE when equidistant."""
    return int(_assign_rows(cell_distances(g.as_array(), cells), tie_tol)[0])


def project_path(path: RotationPath, cells: CellDecomposition,
                 tie_tol: float = TIE_TOL) -> ProjectedPath:
    q = path.quats
    raw = _assign_rows(cell_distances(q, cells), tie_tol)
    assigned = raw.copy()
    if assigned[0] == INTERFACE:
        assigned[0] = int(np.argmin(cell_distances(q[0], cells)))
    for k in range(1, len(assigned)):
        if assigned[k] == INTERFACE:
            assigned[k] = assigned[k - 1]
    crossings = []
    g = cells.group.quats
    for k in range(1, len(assigned)):
        a, b = assigned[k - 1], assigned[k]
        if a == b:
            continue
        mid = q[k - 1] + q[k] if q[k - 1] @ q[k] >= 0 else q[k - 1] - q[k]
        mid = mid / np.linalg.norm(mid)
        dmid = cell_distances(mid, cells)[0]
        near = np.nonzero(dmid - dmid.min() < tie_tol)[0]
        if a not in near and b not in near:
            raise UndersampledPath(
                f"path jumps from cell {a} to cell {b} between samples {k - 1} and {k}")
        crossings.append((k, float(path.times[k]), int(a), int(b)))
    reps = quat_multiply(q, quat_conj(g[assigned]))
    reps = _canonical_rows(reps)
    return ProjectedPath(path.times, reps, assigned, crossings)


def homotopy_class(path: RotationPath, bg: BinaryGroup, tol: float = 1e-7) -> HomotopyClass:
    lifted = path if path.is_lifted() else lift_path(path)
    end = lifted.quats[-1]
    quats = bg.quats
    d = np.linalg.norm(quats - end, axis=1)
    k = int(np.argmin(d))
    if d[k] > tol:
        raise NotClosedInOrbitSpace(
            f"lifted endpoint is {d[k]:.3e} from the nearest element of the binary group")
    return HomotopyClass(bg.elements[k], bg)


# phase representation

@dataclass(frozen=True, eq=False)
class PhaseRepresentation:
    group: BinaryGroup
    values: np.ndarray  # unit complex numbers, aligned with group.elements

    def __call__(self, q: Rotor) -> complex:
        k = self.group.index_of(q, 1e-7)
        if k < 0:
            raise KeyError("rotor is not an element of the group")
        return complex(self.values[k])

    def phases(self) -> np.ndarray:
        return np.angle(self.values)

    def homomorphism_defect(self) -> float:
        """max |rep(q1 q2) - rep(q1) rep(q2)| over all pairs."""
        table = self.group.product_table()
        v = self.values
        return float(np.max(np.abs(v[table] - v[:, None] * v[None, :])))


def phase_representation(psi: SpinState, bg: BinaryGroup, tol: float = 1e-9,
                         check: bool = True) -> PhaseRepresentation:
    if anticoherence_order(psi) < 1:
        warnings.warn("state is not anticoherent; eigenphases are not pure geometric phases",
                      stacklevel=2)
    mats = wigner_d_many(psi.spin, bg.quats)
    ov = np.einsum("i,nij,j->n", psi.amplitudes.conj(), mats, psi.amplitudes)
    bad = np.abs(ov) < 1.0 - tol
    if np.any(bad):
        raise NotASymmetry(f"{int(bad.sum())} group elements do not leave the state invariant")
    rep = PhaseRepresentation(bg, ov / np.abs(ov))
    if check:
        defect = rep.homomorphism_defect()
        if defect > tol:
            raise NotAGroup(f"phase map is not a homomorphism (defect {defect:.3e})")
    return rep


def predicted_phase(cls: HomotopyClass, rep: PhaseRepresentation) -> float:
    v = rep(cls.representative)
    return math.atan2(v.imag, v.real)


def symmetry_group_of(psi: SpinState, tol: float = DETECT_TOL) -> PointGroup:
    return detect_symmetry_group(state_to_constellation(psi), tol)


# plot data

def group_ball_points(group: PointGroup) -> np.ndarray:
    """Axis-angle vectors of the group; rotations by pi appear at both antipodes."""
    pts = []
    for q in group.quats:
        ang = float(quat_angle(q))
        if ang < 1e-12:
            pts.append(np.zeros(3))
            continue
        ax = q[1:] / np.linalg.norm(q[1:])
        if q[0] < 0:
            ax = -ax
        pts.append(ang * ax)
        if abs(ang - math.pi) < 1e-9:
            pts.append(-ang * ax)
    return np.array(pts)


def fibonacci_sphere(n: int) -> np.ndarray:
    k = np.arange(n) + 0.5
    z = 1 - 2 * k / n
    phi = math.pi * (1 + 5**0.5) * k
    r = np.sqrt(1 - z * z)
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)


def identity_cell_boundary(cells: CellDecomposition, n_dirs: int = 2000,
                           iters: int = 50) -> np.ndarray:
    """Axis-angle points on the boundary of the identity cell, one per direction.

    Directions along which the cell reaches the rotation-by-pi sphere return
    points of norm pi.
    """
    dirs = fibonacci_sphere(n_dirs)
    lo = np.zeros(n_dirs)
    hi = np.full(n_dirs, math.pi)

    def inside(r):
        d = cell_distances(quat_exp(dirs * r[:, None]), cells)
        return d[:, 0] <= d.min(axis=1) + 1e-12

    full = inside(hi)
    for _ in range(iters):
        mid = (lo + hi) / 2
        ok = inside(mid)
        lo = np.where(ok, mid, lo)
        hi = np.where(ok, hi, mid)
    radius = np.where(full, math.pi, (lo + hi) / 2)
    return dirs * radius[:, None]
