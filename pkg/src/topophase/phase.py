"""Total, dynamical and geometric phases along rotation orbits of a spin state.

Geometric phase follows the Mukunda-Simon functional with the sign convention
geometric = total + dynamical, where dynamical = i * integral <psi|d/dt psi> dt
is evaluated by the discrete overlap rule -sum_k arg <psi_k|psi_k+1>.

The plain overlap rule is second order in the step size. By default it is
Richardson-extrapolated against the every-other-sample sum, (4 D_N - D_N/2) / 3,
which cancels the leading per-step error and is fourth order on smooth paths.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotASymmetry, UndefinedPhase
from .majorana import MERGE_TOL, Constellation, is_symmetry
from .rotor import RotationPath, Rotor, from_axis_angle, lift_path, rotate_many, wigner_d
from .spincore import SpinState

ORTHOGONALITY_FLOOR = 1e-8
EIGEN_TOL = 1e-9


def wrap_phase(x):
    """Map angles to the principal interval (-pi, pi]."""
    return math.pi - np.mod(math.pi - np.asarray(x, dtype=float), 2 * math.pi)


def phase_distance(a, b):
    """|a - b| folded to [0, pi]."""
    return np.abs(wrap_phase(np.asarray(a) - np.asarray(b)))


@dataclass(frozen=True)
class PhaseReport:
    total: float
    dynamical: float
    geometric: float
    n_samples: int
    richardson_error_estimate: float

    def as_dict(self) -> dict:
        return {
            "total": self.total,
            "dynamical": self.dynamical,
            "geometric": self.geometric,
            "n_samples": self.n_samples,
            "richardson_error_estimate": self.richardson_error_estimate,
        }


def _as_lifted(path: RotationPath) -> RotationPath:
    return path if path.is_lifted() else lift_path(path)


def evolve_amplitudes(path: RotationPath, psi0: SpinState) -> np.ndarray:
    """(N, 2s+1) array of D(R(t_k)) psi0 along the lifted path."""
    path = _as_lifted(path)
    return rotate_many(psi0.spin, path.quats, psi0.amplitudes)


def evolve_along(path: RotationPath, psi0: SpinState) -> list[SpinState]:
    amps = evolve_amplitudes(path, psi0)
    return [SpinState(psi0.spin, a) for a in amps]


def _arg(overlap: complex, floor: float) -> float:
    if abs(overlap) <= floor:
        raise UndefinedPhase(f"overlap {abs(overlap):.3e} is below the orthogonality floor")
    return math.atan2(overlap.imag, overlap.real)


def total_phase(psi_start: SpinState, psi_end: SpinState,
                floor: float = ORTHOGONALITY_FLOOR) -> float:
    return _arg(psi_start.overlap(psi_end), floor)


def _stack(states) -> np.ndarray:
    if isinstance(states, np.ndarray):
        return states
    return np.array([s.amplitudes for s in states])


def _overlap_sum(amps: np.ndarray, floor: float) -> float:
    ov = np.einsum("ij,ij->i", amps[:-1].conj(), amps[1:])
    if np.any(np.abs(ov) <= floor):
        k = int(np.argmin(np.abs(ov)))
        raise UndefinedPhase(f"consecutive overlap {abs(ov[k]):.3e} at step {k} is below the floor")
    return float(-np.sum(np.angle(ov)))


def _every_other(n: int) -> np.ndarray:
    idx = np.arange(0, n, 2)
    return idx if idx[-1] == n - 1 else np.append(idx, n - 1)


def _dynamical_pair(amps: np.ndarray, floor: float) -> tuple[float, float]:
    """(plain overlap sum, Richardson-extrapolated sum)."""
    fine = _overlap_sum(amps, floor)
    if amps.shape[0] < 3:
        return fine, fine
    coarse = _overlap_sum(amps[_every_other(amps.shape[0])], floor)
    return fine, (4.0 * fine - coarse) / 3.0


def dynamical_phase(states, floor: float = ORTHOGONALITY_FLOOR, extrapolate: bool = True) -> float:
    amps = _stack(states)
    if amps.shape[0] < 2:
        raise ValueError("need at least two states")
    plain, extrapolated = _dynamical_pair(amps, floor)
    return extrapolated if extrapolate else plain


def geometric_phase(path: RotationPath, psi0: SpinState, floor: float = ORTHOGONALITY_FLOOR,
                    extrapolate: bool = True) -> PhaseReport:
    """Phases of D(R(t)) psi0 along the path.

    richardson_error_estimate is |geo_N - geo_N/2| / 3, the size of the
    second-order error (and of the correction applied when extrapolating).
    """
    amps = evolve_amplitudes(path, psi0)
    tot = _arg(complex(np.vdot(amps[0], amps[-1])), floor)
    plain, extrapolated = _dynamical_pair(amps, floor)
    dyn = extrapolated if extrapolate else plain
    err = abs(extrapolated - plain) if amps.shape[0] >= 3 else math.nan
    return PhaseReport(tot, dyn, float(wrap_phase(tot + dyn)), amps.shape[0], float(err))


def symmetry_eigenphase(psi: SpinState, r: Rotor, tol: float = EIGEN_TOL) -> float:
    """alpha with D(r) psi = e^{i alpha} psi."""
    ov = complex(np.vdot(psi.amplitudes, wigner_d(psi.spin, r) @ psi.amplitudes))
    if abs(ov) < 1.0 - tol:
        raise NotASymmetry(f"|<psi|D(r) psi>| = {abs(ov):.12f}, rotation is not a symmetry")
    return math.atan2(ov.imag, ov.real)


def stargazing_phase(constellation: Constellation, axis, angle: float,
                     tol: float = MERGE_TOL) -> float:
    """Eigenphase read off the stars: angle * (s - p), p = stars on the +axis."""
    r = from_axis_angle(axis, angle)
    if not is_symmetry(constellation, r, tol):
        raise NotASymmetry("rotation does not map the constellation to itself")
    p = constellation.count_at(axis, tol)
    return float(wrap_phase(angle * (constellation.spin.s - p)))
