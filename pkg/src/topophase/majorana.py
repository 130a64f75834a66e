"""Majorana stellar representation: state <-> polynomial <-> constellation.

Stereographic convention: a finite root zeta = tan(theta/2) e^{i phi} sits at
polar angle theta from the north pole, so zeta = 0 is (0, 0, 1) and roots lost
to degree deficiency sit at the south pole.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import DegenerateState
from .rotor import Rotor, so3_matrix
from .spincore import Spin, SpinState, make_state

CLUSTER_TOL = 1e-6
MERGE_TOL = 1e-7
# leading coefficients below this fraction of the largest are treated as zero
DEGREE_EPS = 1e-14
NEWTON_STEPS = 2
# candidate radius for multiple roots, and the residual that confirms one
LOOSE_CLUSTER_TOL = 1e-1
MULTIPLE_ROOT_RESIDUAL = 1e-10
# allowed relative irregularity of the m-gon a perturbed m-fold root splits into
POLYGON_TOL = 0.3


@dataclass(frozen=True, eq=False)
class MajoranaRoots:
    spin: Spin
    finite_roots: list  # [(complex, int)]
    infinity_multiplicity: int

    def __post_init__(self):
        total = sum(m for _, m in self.finite_roots) + self.infinity_multiplicity
        if total != self.spin.twice_s:
            raise ValueError(f"root multiplicities sum to {total}, expected {self.spin.twice_s}")


@dataclass(frozen=True, eq=False)
class Constellation:
    spin: Spin
    stars: list = field(default_factory=list)  # [(unit 3-vector, int)]

    def __post_init__(self):
        stars = []
        for d, m in self.stars:
            d = np.array(d, dtype=float)
            d.setflags(write=False)
            stars.append((d, int(m)))
        object.__setattr__(self, "stars", stars)
        total = sum(m for _, m in stars)
        if total != self.spin.twice_s:
            raise ValueError(f"constellation has {total} stars, expected {self.spin.twice_s}")
        for d, m in stars:
            if abs(np.linalg.norm(d) - 1.0) > 1e-12 or m < 1:
                raise ValueError("stars need unit directions and positive multiplicities")

    @property
    def directions(self) -> np.ndarray:
        if not self.stars:
            return np.zeros((0, 3))
        return np.array([d for d, _ in self.stars])

    @property
    def multiplicities(self) -> np.ndarray:
        return np.array([m for _, m in self.stars], dtype=int)

    def points(self) -> np.ndarray:
        """All 2s stars, repeated by multiplicity, as a (2s, 3) array."""
        if not self.stars:
            return np.zeros((0, 3))
        return np.repeat(self.directions, self.multiplicities, axis=0)

    def rotated(self, r: Rotor) -> "Constellation":
        mat = so3_matrix(r)
        stars = [(_unit(mat @ d), m) for d, m in self.stars]
        return Constellation(self.spin, stars)

    def count_at(self, direction, tol: float = MERGE_TOL) -> int:
        """Total multiplicity of stars within ``tol`` chordal distance of ``direction``."""
        if not self.stars:
            return 0
        dist = np.linalg.norm(self.directions - np.asarray(direction, float), axis=1)
        return int(self.multiplicities[dist < tol].sum())


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def _binomials(n: int) -> np.ndarray:
    return np.array([math.comb(n, k) for k in range(n + 1)], dtype=float)


def _weights(twice_s: int) -> np.ndarray:
    """(-1)^(2s-k) sqrt(C(2s, k)) for k = 0..2s."""
    k = np.arange(twice_s + 1)
    return np.where((twice_s - k) % 2, -1.0, 1.0) * np.sqrt(_binomials(twice_s))


def majorana_polynomial(state: SpinState) -> np.ndarray:
    """Coefficients of P(zeta) in ascending powers, length 2s+1.

    c_k is the amplitude of m = k - s, i.e. amplitudes[2s - k].
    """
    c = state.amplitudes[::-1]
    return _weights(state.twice_s) * c


def _polish(coeffs_desc: np.ndarray, z: complex) -> complex:
    deriv = np.polyder(coeffs_desc)
    val = np.polyval(coeffs_desc, z)
    for _ in range(NEWTON_STEPS):
        dval = np.polyval(deriv, z)
        if dval == 0:
            break
        cand = z - val / dval
        cval = np.polyval(coeffs_desc, cand)
        if not abs(cval) < abs(val):
            break
        z, val = cand, cval
    return z


def _link_groups(values: list[complex], tol: float) -> list[list[int]]:
    """Single-linkage grouping with radius tol * max(1, |z|)."""
    n = len(values)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            scale = max(1.0, abs(values[i]), abs(values[j]))
            if abs(values[i] - values[j]) <= tol * scale:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _multiple_root(desc: np.ndarray, zs: list[complex]) -> complex | None:
    """Centre of ``zs`` if they are the scatter of one root of multiplicity len(zs).

    The centre is refined as a simple root of the (m-1)-th derivative. A
    perturbed m-fold root splits into a near-regular m-gon about it, so the
    offsets must share a modulus and their m-th powers must agree; the lower
    derivatives must also vanish to MULTIPLE_ROOT_RESIDUAL relative backward error.
    """
    m = len(zs)
    z = complex(np.mean(zs))
    high = np.polyder(desc, m - 1)
    high_d = np.polyder(high)
    for _ in range(4):
        dval = np.polyval(high_d, z)
        if dval == 0:
            break
        z = z - np.polyval(high, z) / dval
    offsets = np.asarray(zs) - z
    radius = np.abs(offsets)
    if radius.max() > 1e-12 * max(1.0, abs(z)):
        if np.ptp(radius) > POLYGON_TOL * radius.mean():
            return None
        powers = offsets**m
        if np.max(np.abs(powers - powers.mean())) > POLYGON_TOL * np.abs(powers).mean():
            return None
    for j in range(m - 1):
        dj = np.polyder(desc, j) if j else desc
        bound = np.polyval(np.abs(dj), abs(z))
        if abs(np.polyval(dj, z)) > MULTIPLE_ROOT_RESIDUAL * bound:
            return None
    return complex(z)


def _cluster(values: list[complex], tol: float, desc: np.ndarray | None = None,
             desc_rev: np.ndarray | None = None) -> list[tuple[complex, int, bool]]:
    """Group numerically coincident roots into (centre, multiplicity, isolated).

    A multiplicity-m root scatters by about eps^(1/m), so candidate groups are
    formed at a loose radius and accepted only when verified against the
    polynomial (in 1/zeta outside the unit disk). Rejected groups are split at
    a third of the radius, down to ``tol``, below which roots always merge.
    ``isolated`` marks simple roots with no neighbour within the loose radius.
    """
    out: list[tuple[complex, int]] = []

    def verified(zs):
        if desc is None:
            return None
        if abs(np.mean(zs)) <= 1.0:
            return _multiple_root(desc, zs)
        if all(z != 0 for z in zs):
            w = _multiple_root(desc_rev, [1.0 / z for z in zs])
            return 1.0 / w if w not in (None, 0) else None
        return None

    def split(zs, radius, isolated):
        if radius <= tol:
            for sub in _link_groups(zs, tol):
                out.append((complex(np.mean([zs[i] for i in sub])), len(sub), False))
            return
        for sub in _link_groups(zs, radius):
            group = [zs[i] for i in sub]
            if len(group) == 1:
                out.append((complex(group[0]), 1, isolated))
                continue
            centre = verified(group)
            if centre is not None:
                out.append((complex(centre), len(group), False))
            else:
                split(group, radius / 3, False)

    split(list(values), LOOSE_CLUSTER_TOL, True)
    out.sort(key=lambda r: (abs(r[0]), np.angle(r[0])))
    return out


def polynomial_roots(coeffs, cluster_tol: float = CLUSTER_TOL) -> MajoranaRoots:
    """Roots of an ascending-order coefficient vector of nominal degree 2s."""
    coeffs = np.asarray(coeffs, dtype=complex)
    twice_s = coeffs.shape[0] - 1
    scale = np.max(np.abs(coeffs)) if coeffs.size else 0.0
    if not scale > 0:
        raise DegenerateState("Majorana polynomial is identically zero")
    nonzero = np.nonzero(np.abs(coeffs) > DEGREE_EPS * scale)[0]
    degree = int(nonzero[-1])
    trimmed = coeffs[: degree + 1]
    desc = trimmed[::-1]
    desc_rev = trimmed  # reversed polynomial, roots 1/zeta

    raw = np.roots(desc) if degree > 0 else np.array([], dtype=complex)
    # cluster before polishing: Newton on a multiple root distorts its scatter pattern
    finite = []
    for z, m, isolated in _cluster([complex(z) for z in raw], cluster_tol, desc, desc_rev):
        if isolated:
            if abs(z) <= 1.0:
                z = complex(_polish(desc, z))
            else:
                w = _polish(desc_rev, 1.0 / z)
                z = complex(1.0 / w) if w != 0 else z
        finite.append((z, m))
    return MajoranaRoots(Spin(twice_s), finite, twice_s - degree)


def _merge_stars(points: list[tuple[np.ndarray, int]], tol: float):
    merged: list[list] = []
    for d, m in points:
        for entry in merged:
            if np.linalg.norm(entry[0] - d) <= tol:
                total = entry[1] + m
                entry[0] = _unit((entry[0] * entry[1] + d * m) / total)
                entry[1] = total
                break
        else:
            merged.append([d, m])
    return [(d, m) for d, m in merged]


def root_to_direction(z: complex) -> np.ndarray:
    r2 = abs(z) ** 2
    if not math.isfinite(r2):
        return np.array([0.0, 0.0, -1.0])
    v = np.array([2 * z.real, 2 * z.imag, 1.0 - r2]) / (1.0 + r2)
    return _unit(v)


def roots_to_constellation(roots: MajoranaRoots, merge_tol: float = MERGE_TOL) -> Constellation:
    points = [(root_to_direction(z), m) for z, m in roots.finite_roots]
    if roots.infinity_multiplicity:
        points.append((np.array([0.0, 0.0, -1.0]), roots.infinity_multiplicity))
    return Constellation(roots.spin, _merge_stars(points, merge_tol))


def state_to_constellation(state: SpinState, cluster_tol: float = CLUSTER_TOL,
                           merge_tol: float = MERGE_TOL) -> Constellation:
    roots = polynomial_roots(majorana_polynomial(state), cluster_tol)
    return roots_to_constellation(roots, merge_tol)


def _linear_factor(d: np.ndarray) -> np.ndarray:
    """Ascending coefficients of cos(theta/2) zeta - sin(theta/2) e^{i phi}."""
    x, y, z = d
    cos_half = math.sqrt(max(0.0, (1.0 + z) / 2))
    rho = math.hypot(x, y)
    if z > 0:
        sin_phase = complex(x, y) / (2 * cos_half)
    elif rho > 0:
        sin_phase = math.sqrt(max(0.0, (1.0 - z) / 2)) * complex(x, y) / rho
    else:
        sin_phase = 1.0
    return np.array([-sin_phase, cos_half], dtype=complex)


def constellation_to_state(constellation: Constellation) -> SpinState:
    """State with the given stars, phase fixed so the first nonzero amplitude is real positive."""
    twice_s = constellation.spin.twice_s
    poly = np.array([1.0], dtype=complex)
    for d in constellation.points():
        poly = np.convolve(poly, _linear_factor(d))
    c = poly / _weights(twice_s)
    amps = c[::-1]
    mags = np.abs(amps)
    lead = int(np.nonzero(mags > 1e-10 * mags.max())[0][0])
    amps = amps * (abs(amps[lead]) / amps[lead])
    return make_state(constellation.spin, amps)


def star_distance(a: Constellation, b: Constellation) -> float:
    """Largest chordal distance under the optimal pairing of the two star multisets."""
    pa, pb = a.points(), b.points()
    if pa.shape != pb.shape:
        return math.inf
    if pa.shape[0] == 0:
        return 0.0
    cost = np.linalg.norm(pa[:, None, :] - pb[None, :, :], axis=-1)
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


def is_symmetry(constellation: Constellation, r: Rotor, tol: float = MERGE_TOL) -> bool:
    """Whether the rotation maps the star multiset to itself within ``tol``."""
    dirs = constellation.directions
    if dirs.shape[0] == 0:
        return True
    mults = constellation.multiplicities
    moved = dirs @ so3_matrix(r).T
    dist = np.linalg.norm(moved[:, None, :] - dirs[None, :, :], axis=-1)
    nearest = np.argmin(dist, axis=1)
    if np.any(dist[np.arange(len(dirs)), nearest] > tol):
        return False
    if np.any(mults[nearest] != mults):
        return False
    return len(set(nearest.tolist())) == len(dirs)
