"""SU(2) rotors, Wigner-D matrices and sampled rotation paths."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import BadAxis, UndersampledPath
from .spincore import Spin, spin_matrices

UNIT_TOL = 1e-12
CONTINUITY_MARGIN = math.pi / 2


@dataclass(frozen=True)
class Rotor:
    """Unit quaternion w + xi + yj + zk acting as an SU(2) element."""

    w: float
    x: float
    y: float
    z: float

    @classmethod
    def identity(cls) -> "Rotor":
        return cls(1.0, 0.0, 0.0, 0.0)

    @classmethod
    def from_array(cls, q, normalize: bool = False) -> "Rotor":
        q = np.asarray(q, dtype=float)
        if normalize:
            q = q / np.linalg.norm(q)
        return cls(*(float(v) for v in q))

    def as_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])

    @property
    def vec(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def __neg__(self) -> "Rotor":
        return Rotor(-self.w, -self.x, -self.y, -self.z)

    def __mul__(self, other: "Rotor") -> "Rotor":
        return compose(self, other)

    def inverse(self) -> "Rotor":
        return Rotor(self.w, -self.x, -self.y, -self.z)

    def axis_angle(self) -> tuple[np.ndarray, float]:
        """Axis and angle in [0, 2pi]; the axis defaults to z when undefined."""
        v = self.vec
        sin_half = np.linalg.norm(v)
        angle = 2.0 * math.atan2(sin_half, self.w)
        if sin_half == 0.0:
            return np.array([0.0, 0.0, 1.0]), angle
        return v / sin_half, angle

    def canonical(self) -> "Rotor":
        """Sign representative of the SO(3) class: w > 0, ties broken lexicographically."""
        return Rotor.from_array(canonical_sign(self.as_array()))

    def is_close(self, other: "Rotor", tol: float = 1e-9) -> bool:
        return bool(np.linalg.norm(self.as_array() - other.as_array()) <= tol)


def canonical_sign(q: np.ndarray, eps: float = 1e-12) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    for c in q:
        if abs(c) > eps:
            return q if c > 0 else -q
    return q


def quat_multiply(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Hamilton product, broadcasting over leading axes."""
    aw, ax, ay, az = np.moveaxis(np.asarray(a, dtype=float), -1, 0)
    bw, bx, by, bz = np.moveaxis(np.asarray(b, dtype=float), -1, 0)
    return np.stack([
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    ], axis=-1)


def quat_conj(q: np.ndarray) -> np.ndarray:
    return np.asarray(q, dtype=float) * np.array([1.0, -1.0, -1.0, -1.0])


def quat_exp(v: np.ndarray) -> np.ndarray:
    """Rotor for rotation vectors v (angle |v| about v/|v|), broadcasting."""
    v = np.asarray(v, dtype=float)
    angle = np.linalg.norm(v, axis=-1)
    half = angle / 2
    # sin(a/2)/a, with its limit 1/2 at a = 0
    safe = np.where(angle > 0, angle, 1.0)
    scale = np.where(angle > 1e-8, np.sin(half) / safe, 0.5 - angle**2 / 48)
    return np.concatenate([np.cos(half)[..., None], v * scale[..., None]], axis=-1)


def quat_angle(q: np.ndarray) -> np.ndarray:
    """SO(3) rotation angle in [0, pi] of (stacked) rotors."""
    q = np.asarray(q, dtype=float)
    return 2.0 * np.arctan2(np.linalg.norm(q[..., 1:], axis=-1), np.abs(q[..., 0]))


def from_axis_angle(axis, angle: float) -> Rotor:
    axis = np.asarray(axis, dtype=float)
    norm = np.linalg.norm(axis)
    if axis.shape != (3,) or not abs(norm - 1.0) <= 1e-9:
        raise BadAxis(f"axis must be a unit 3-vector, got {axis!r}")
    half = angle / 2
    return Rotor(math.cos(half), *(float(math.sin(half) * a) for a in axis))


def compose(a: Rotor, b: Rotor) -> Rotor:
    return Rotor.from_array(quat_multiply(a.as_array(), b.as_array()))


def so3_matrix(r: Rotor) -> np.ndarray:
    w, x, y, z = r.w, r.x, r.y, r.z
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def relative_angle(a: Rotor, b: Rotor) -> float:
    """Angle of the SO(3) rotation a b^-1, in [0, pi]."""
    return float(quat_angle(quat_multiply(a.as_array(), quat_conj(b.as_array()))))


def _eigen_stack(twice_s: int, quats: np.ndarray):
    """Eigenvectors of axis.S and the phases exp(-i angle m) for each rotor."""
    quats = np.atleast_2d(np.asarray(quats, dtype=float))
    vec = quats[:, 1:]
    sin_half = np.linalg.norm(vec, axis=1)
    angle = 2.0 * np.arctan2(sin_half, quats[:, 0])
    axis = np.zeros_like(vec)
    axis[:, 2] = 1.0
    ok = sin_half > 0
    axis[ok] = vec[ok] / sin_half[ok, None]
    # n.S = U (sin(theta) Sx + cos(theta) Sz) U^dagger with U = exp(-i phi Sz);
    # the middle factor is real symmetric, which keeps the batched eigh cheap
    ops = spin_matrices(Spin(twice_s))
    if axis.shape[0] > 1 and ok.any() and np.max(np.ptp(axis[ok], axis=0)) < 1e-14:
        # constant-axis path: one decomposition serves every sample (the axis
        # is irrelevant where sin(angle/2) = 0)
        common = axis[ok][0]
        vecs1, _ = _eigen_stack(twice_s, np.concatenate([[0.0], common])[None, :])
        vecs = np.broadcast_to(vecs1, (axis.shape[0],) + vecs1.shape[1:])
        m = np.arange(-twice_s, twice_s + 1, 2) / 2.0
        return vecs, np.exp(-1j * angle[:, None] * m[None, :])
    theta = np.arctan2(np.hypot(axis[:, 0], axis[:, 1]), axis[:, 2])
    phi = np.arctan2(axis[:, 1], axis[:, 0])
    real_gen = (np.sin(theta)[:, None, None] * ops.sx.real[None]
                + np.cos(theta)[:, None, None] * ops.sz.real[None])
    _, rvecs = np.linalg.eigh(real_gen)
    mz = Spin(twice_s).m_values()
    vecs = np.exp(-1j * phi[:, None] * mz[None, :])[:, :, None] * rvecs
    # eigh sorts ascending; the exact spectrum of a unit-axis generator is -s..s
    m = np.arange(-twice_s, twice_s + 1, 2) / 2.0
    phases = np.exp(-1j * angle[:, None] * m[None, :])
    return vecs, phases


def _wigner_stack(twice_s: int, quats: np.ndarray) -> np.ndarray:
    quats = np.atleast_2d(np.asarray(quats, dtype=float))
    if twice_s == 0:
        return np.ones((quats.shape[0], 1, 1), dtype=complex)
    vecs, phases = _eigen_stack(twice_s, quats)
    return (vecs * phases[:, None, :]) @ np.conj(np.swapaxes(vecs, 1, 2))


def wigner_d(spin: Spin, r: Rotor) -> np.ndarray:
    """Spin-s representation matrix exp(-i angle axis.S) of the rotor."""
    return _wigner_stack(spin.twice_s, r.as_array()[None, :])[0]


def wigner_d_many(spin: Spin, quats: np.ndarray) -> np.ndarray:
    """Batched wigner_d over an (N, 4) array of rotors."""
    return _wigner_stack(spin.twice_s, quats)


def rotate_many(spin: Spin, quats: np.ndarray, amplitudes: np.ndarray) -> np.ndarray:
    """Rows D(q_k) psi without forming the matrices."""
    quats = np.atleast_2d(np.asarray(quats, dtype=float))
    psi = np.asarray(amplitudes, dtype=complex)
    if spin.twice_s == 0:
        return np.tile(psi, (quats.shape[0], 1))
    vecs, phases = _eigen_stack(spin.twice_s, quats)
    coeffs = np.einsum("nji,j->ni", vecs.conj(), psi)
    return np.einsum("nij,nj->ni", vecs, phases * coeffs)


@dataclass(frozen=True, eq=False)
class RotationPath:
    """Time-tagged samples R(t_k), t from 0 to 1.

    Stored as arrays: ``times`` (N,) and ``quats`` (N, 4).
    """

    times: np.ndarray = field(repr=False)
    quats: np.ndarray = field(repr=False)

    def __post_init__(self):
        t = np.array(self.times, dtype=float)
        q = np.array(self.quats, dtype=float)
        if t.ndim != 1 or q.shape != (t.shape[0], 4):
            raise ValueError("times must be (N,) and quats (N, 4)")
        if t.shape[0] < 2:
            raise UndersampledPath("a rotation path needs at least two samples")
        if t[0] != 0.0 or t[-1] != 1.0 or np.any(np.diff(t) <= 0):
            raise ValueError("times must increase strictly from 0 to 1")
        norms = np.linalg.norm(q, axis=1)
        if np.max(np.abs(norms - 1.0)) > 1e-9:
            raise ValueError("path samples must be unit quaternions")
        steps = step_angles(q)
        if np.any(steps >= CONTINUITY_MARGIN):
            k = int(np.argmax(steps))
            raise UndersampledPath(
                f"step {k} rotates by {steps[k]:.4f} rad, continuity margin is pi/2")
        t.setflags(write=False)
        q.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "quats", q)

    def __len__(self):
        return self.times.shape[0]

    @property
    def rotors(self) -> list[Rotor]:
        return [Rotor.from_array(q) for q in self.quats]

    @property
    def samples(self) -> list[tuple[float, Rotor]]:
        return list(zip(self.times.tolist(), self.rotors))

    @property
    def start(self) -> Rotor:
        return Rotor.from_array(self.quats[0])

    @property
    def end(self) -> Rotor:
        return Rotor.from_array(self.quats[-1])

    def is_lifted(self) -> bool:
        dots = np.einsum("ij,ij->i", self.quats[:-1], self.quats[1:])
        return bool(np.all(dots > 0) and np.array_equal(self.quats[0], [1.0, 0.0, 0.0, 0.0]))

    def reparametrize(self, new_times) -> "RotationPath":
        """Same samples, new monotone time tags."""
        return RotationPath(np.asarray(new_times, dtype=float), self.quats)

    def reversed(self) -> "RotationPath":
        """The same locus traversed backwards, re-based at the identity."""
        q = quat_multiply(self.quats[::-1], quat_conj(self.quats[-1]))
        return RotationPath(1.0 - self.times[::-1], q)

    def then(self, other: "RotationPath") -> "RotationPath":
        """Concatenation: run self, then other right-multiplied by self's endpoint.

        Right multiplication keeps the second leg's projective loop unchanged
        when self ends on a symmetry of the state.
        """
        q2 = quat_multiply(other.quats, self.quats[-1])
        t = np.concatenate([self.times / 2, 0.5 + other.times[1:] / 2])
        return RotationPath(t, np.concatenate([self.quats, q2[1:]]))


def step_angles(quats: np.ndarray) -> np.ndarray:
    q = np.asarray(quats, dtype=float)
    return quat_angle(quat_multiply(q[1:], quat_conj(q[:-1])))


def _uniform_times(n: int) -> np.ndarray:
    t = np.linspace(0.0, 1.0, n)
    t[-1] = 1.0
    return t


def _check_steps(n_steps: int):
    if n_steps < 8:
        raise UndersampledPath(f"need at least 8 samples, got {n_steps}")


def loop_about(axis, total_angle: float, n_steps: int) -> RotationPath:
    """R(t) = rotation by total_angle * t about a fixed axis."""
    _check_steps(n_steps)
    axis = np.asarray(axis, dtype=float)
    if axis.shape != (3,) or not abs(np.linalg.norm(axis) - 1.0) <= 1e-9:
        raise BadAxis(f"axis must be a unit 3-vector, got {axis!r}")
    t = _uniform_times(n_steps)
    return RotationPath(t, quat_exp(np.outer(t * total_angle, axis)))


def geodesic_path(target: Rotor, n_steps: int) -> RotationPath:
    """Constant-axis SU(2) geodesic from the identity to ``target`` itself."""
    axis, angle = target.axis_angle()
    path = loop_about(axis, angle, n_steps)
    quats = np.array(path.quats)
    quats[-1] = target.as_array()
    return RotationPath(path.times, quats)


def path_from_samples(samples: Sequence[tuple[float, Rotor]] | Iterable) -> RotationPath:
    samples = list(samples)
    if len(samples) < 2:
        raise UndersampledPath("a rotation path needs at least two samples")
    t = [float(s[0]) for s in samples]
    q = [s[1].as_array() if isinstance(s[1], Rotor) else np.asarray(s[1], float)
         for s in samples]
    return RotationPath(np.array(t), np.array(q))


def path_from_axis_angles(rows) -> RotationPath:
    """Uniformly time-tagged path from rows (nx, ny, nz, angle)."""
    rows = np.asarray(rows, dtype=float)
    if rows.ndim != 2 or rows.shape[1] != 4:
        raise ValueError("axis-angle rows must have 4 entries")
    if rows.shape[0] < 2:
        raise UndersampledPath("a rotation path needs at least two samples")
    axes = rows[:, :3]
    norms = np.linalg.norm(axes, axis=1)
    if np.any(np.abs(norms - 1.0) > 1e-9):
        raise BadAxis("axis-angle rows need unit axes")
    return RotationPath(_uniform_times(rows.shape[0]), quat_exp(axes * rows[:, 3:4]))


def lift_path(path: RotationPath) -> RotationPath:
    """Sign-continuous SU(2) lift starting exactly at +identity."""
    q = np.array(path.quats)
    if quat_angle(q[0]) > 1e-9:
        raise ValueError("path must start at the identity rotation")
    q[0] = [1.0, 0.0, 0.0, 0.0]
    for k in range(1, q.shape[0]):
        dot = float(q[k] @ q[k - 1])
        if abs(dot) <= math.cos(CONTINUITY_MARGIN / 2):
            raise UndersampledPath(f"sign lift ambiguous at sample {k}")
        if dot < 0:
            q[k] = -q[k]
    return RotationPath(path.times, q)


def resample_path(path: RotationPath, n_samples: int) -> RotationPath:
    """Uniform resampling by piecewise slerp between the (lifted) samples."""
    if n_samples < 2:
        raise UndersampledPath("a rotation path needs at least two samples")
    src = path.quats if path.is_lifted() else lift_path(path).quats
    t_new = _uniform_times(n_samples)
    k = np.clip(np.searchsorted(path.times, t_new, side="right") - 1, 0, len(path) - 2)
    t0, t1 = path.times[k], path.times[k + 1]
    u = ((t_new - t0) / (t1 - t0))[:, None]
    rel = quat_multiply(quat_conj(src[k]), src[k + 1])
    sin_half = np.linalg.norm(rel[:, 1:], axis=1, keepdims=True)
    half = np.arctan2(sin_half, rel[:, :1])
    axis = rel[:, 1:] / np.maximum(sin_half, 1e-300)
    step = quat_exp(2.0 * half * u * axis)
    q = quat_multiply(src[k], step)
    q /= np.linalg.norm(q, axis=1, keepdims=True)
    q[0], q[-1] = src[0], src[-1]
    return RotationPath(t_new, q)
