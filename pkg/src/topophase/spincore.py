"""Spin-s Hilbert space primitives.

Amplitudes are always stored in the S_z eigenbasis ordered m = s, s-1, ..., -s.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import DegenerateState, DimensionMismatch

DEFAULT_TOL = 1e-9
MAX_EXACT_TWICE_S = 40


@dataclass(frozen=True)
class Spin:
    """Spin quantum number stored as 2s so half-integers stay exact."""

    twice_s: int

    def __post_init__(self):
        if not isinstance(self.twice_s, (int, np.integer)) or self.twice_s < 0:
            raise ValueError(f"twice_s must be a non-negative integer, got {self.twice_s!r}")
        object.__setattr__(self, "twice_s", int(self.twice_s))

    @classmethod
    def of(cls, s) -> "Spin":
        twice = Fraction(s) * 2
        if twice.denominator != 1:
            raise ValueError(f"spin must be integer or half-integer, got {s!r}")
        return cls(int(twice))

    @property
    def s(self) -> float:
        return self.twice_s / 2

    @property
    def dim(self) -> int:
        return self.twice_s + 1

    def m_values(self) -> np.ndarray:
        return self.s - np.arange(self.dim)

    def __str__(self):
        return f"{self.twice_s // 2}" if self.twice_s % 2 == 0 else f"{self.twice_s}/2"


@dataclass(frozen=True, eq=False)
class SpinState:
    spin: Spin
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def twice_s(self) -> int:
        return self.spin.twice_s

    def overlap(self, other: "SpinState") -> complex:
        """<self|other>"""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity(self, other: "SpinState") -> float:
        return abs(self.overlap(other))


@dataclass(frozen=True, eq=False)
class SpinOperators:
    spin: Spin
    sx: np.ndarray = field(repr=False)
    sy: np.ndarray = field(repr=False)
    sz: np.ndarray = field(repr=False)

    def along(self, n) -> np.ndarray:
        """The generator n.S for a direction n (not renormalized)."""
        n = np.asarray(n, dtype=float)
        return n[0] * self.sx + n[1] * self.sy + n[2] * self.sz

    def stacked(self) -> np.ndarray:
        return np.stack([self.sx, self.sy, self.sz])


def make_state(spin: Spin, amplitudes) -> SpinState:
    amps = np.asarray(amplitudes, dtype=complex).ravel()
    if amps.shape[0] != spin.dim:
        raise DimensionMismatch(
            f"spin {spin} needs {spin.dim} amplitudes, got {amps.shape[0]}")
    norm = np.linalg.norm(amps)
    if not np.isfinite(norm) or norm == 0.0:
        raise DegenerateState("amplitude vector is zero or not finite")
    if abs(norm - 1.0) > 4 * np.finfo(float).eps:  # keep already-normalized input bit-identical
        amps = amps / norm
    return SpinState(spin, amps)


def basis_state(spin: Spin, m) -> SpinState:
    """|s, m> for m in {s, s-1, ..., -s}."""
    idx = Fraction(spin.twice_s, 2) - Fraction(m)
    if idx.denominator != 1 or not 0 <= idx < spin.dim:
        raise ValueError(f"m={m} is not a valid projection for spin {spin}")
    amps = np.zeros(spin.dim, dtype=complex)
    amps[int(idx)] = 1.0
    return SpinState(spin, amps)


@lru_cache(maxsize=None)
def _spin_matrices(twice_s: int):
    spin = Spin(twice_s)
    s = spin.s
    m = spin.m_values()
    # S+ |m> = sqrt(s(s+1) - m(m+1)) |m+1>; index i-1 holds m+1
    splus = np.zeros((spin.dim, spin.dim), dtype=complex)
    for i in range(1, spin.dim):
        splus[i - 1, i] = math.sqrt(s * (s + 1) - m[i] * (m[i] + 1))
    sminus = splus.conj().T
    sx = (splus + sminus) / 2
    sy = (splus - sminus) / 2j
    sz = np.diag(m).astype(complex)
    for a in (sx, sy, sz):
        a.setflags(write=False)
    return sx, sy, sz


def spin_matrices(spin: Spin) -> SpinOperators:
    sx, sy, sz = _spin_matrices(spin.twice_s)
    return SpinOperators(spin, sx, sy, sz)


def spin_expectation(state: SpinState) -> np.ndarray:
    ops = spin_matrices(state.spin)
    psi = state.amplitudes
    vals = np.array([np.vdot(psi, op @ psi) for op in (ops.sx, ops.sy, ops.sz)])
    return vals.real


def clebsch_gordan(j1: Fraction, m1: Fraction, j2: Fraction, m2: Fraction,
                   J: Fraction, M: Fraction) -> float:
    """<j1 m1; j2 m2 | J M> by the Racah factorial sum in exact arithmetic.

    Arguments may be ints, floats with exact binary values, or Fractions.
    """
    j1, m1, j2, m2, J, M = (Fraction(v) for v in (j1, m1, j2, m2, J, M))
    if m1 + m2 != M:
        return 0.0
    if not (abs(j1 - j2) <= J <= j1 + j2):
        return 0.0
    if abs(m1) > j1 or abs(m2) > j2 or abs(M) > J:
        return 0.0
    ints = [j1 + j2 - J, j1 - m1, j1 + m1, j2 - m2, j2 + m2, J - M, J + M,
            J + j1 - j2, J - j1 + j2, j1 + j2 + J + 1]
    if any(v.denominator != 1 for v in ints):
        return 0.0
    f = math.factorial

    def fi(v):
        return f(int(v))

    pref = (2 * J + 1)
    pref *= Fraction(fi(J + j1 - j2) * fi(J - j1 + j2) * fi(j1 + j2 - J), fi(j1 + j2 + J + 1))
    pref *= fi(J + M) * fi(J - M) * fi(j1 - m1) * fi(j1 + m1) * fi(j2 - m2) * fi(j2 + m2)

    kmin = int(max(0, j2 - J - m1, j1 - J + m2))
    kmax = int(min(j1 + j2 - J, j1 - m1, j2 + m2))
    total = Fraction(0)
    for k in range(kmin, kmax + 1):
        den = (f(k) * fi(j1 + j2 - J - k) * fi(j1 - m1 - k) * fi(j2 + m2 - k)
               * fi(J - j2 + m1 + k) * fi(J - j1 - m2 + k))
        total += Fraction((-1) ** k, den)
    if total == 0:
        return 0.0
    return math.copysign(math.sqrt(pref * total * total), total)


@lru_cache(maxsize=None)
def multipole_operators(twice_s: int, rank: int) -> np.ndarray:
    """Stack of the 2L+1 spherical tensor operators T^L_M, M = L..-L.

    (T^L_M)_{m m'} = (-1)^(s-m') <s m; s -m' | L M>, each unit Frobenius norm.
    """
    if twice_s > MAX_EXACT_TWICE_S:
        raise ValueError(f"exact Clebsch-Gordan table limited to 2s <= {MAX_EXACT_TWICE_S}")
    s = Fraction(twice_s, 2)
    dim = twice_s + 1
    ms = [s - i for i in range(dim)]
    out = np.zeros((2 * rank + 1, dim, dim))
    for a, M in enumerate(range(rank, -rank - 1, -1)):
        for i, m in enumerate(ms):
            for j, mp in enumerate(ms):
                if m - mp != M:
                    continue
                sign = -1 if (s - mp) % 2 else 1
                out[a, i, j] = sign * clebsch_gordan(s, m, s, -mp, rank, M)
    out.setflags(write=False)
    return out


def multipole_moments(state: SpinState, rank: int) -> np.ndarray:
    """Expectation values <T^L_M> for M = L..-L."""
    psi = state.amplitudes
    ops = multipole_operators(state.twice_s, rank)
    return np.einsum("i,aij,j->a", psi.conj(), ops, psi)


def anticoherence_order(state: SpinState, tol: float = DEFAULT_TOL) -> int:
    """Largest k such that <(n.S)^r> is direction-independent for r = 1..k.

    Equivalent to the vanishing of every multipole moment of rank 1..k.
    """
    for rank in range(1, state.twice_s + 1):
        if np.max(np.abs(multipole_moments(state, rank))) > tol:
            return rank - 1
    return state.twice_s
