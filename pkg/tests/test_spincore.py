import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

import oracles
from topophase import catalog
from topophase.errors import DegenerateState, DimensionMismatch
from topophase.spincore import (Spin, anticoherence_order, basis_state, clebsch_gordan,
                                make_state, multipole_moments, spin_expectation, spin_matrices)

SQ2 = math.sqrt(2)


def test_spin_basics():
    assert Spin.of(Fraction(3, 2)).twice_s == 3
    assert Spin.of(2).dim == 5
    np.testing.assert_array_equal(Spin(3).m_values(), [1.5, 0.5, -0.5, -1.5])
    with pytest.raises(ValueError):
        Spin(-1)
    with pytest.raises(ValueError):
        Spin.of(0.25)


def test_make_state_normalizes_tetra():
    psi = make_state(Spin(4), [1, 0, 0, SQ2, 0])
    np.testing.assert_allclose(psi.amplitudes, np.array([1, 0, 0, SQ2, 0]) / math.sqrt(3), atol=1e-15)
    scaled = make_state(Spin(4), [2, 0, 0, 2 * SQ2, 0])
    assert abs(psi.fidelity(scaled) - 1) < 1e-15
    up = make_state(Spin(1), [1, 0])
    assert np.linalg.norm(up.amplitudes) == 1.0


def test_make_state_errors():
    with pytest.raises(DimensionMismatch):
        make_state(Spin(2), [1, 0])
    with pytest.raises(DegenerateState):
        make_state(Spin(2), [0, 0, 0])
    with pytest.raises(DegenerateState):
        make_state(Spin(1), [np.nan, 1])


def test_amplitudes_read_only(tetra):
    with pytest.raises(ValueError):
        tetra.amplitudes[0] = 0


def test_spin_half_and_one_matrices():
    ops = spin_matrices(Spin(1))
    np.testing.assert_allclose(ops.sx, [[0, 0.5], [0.5, 0]])
    np.testing.assert_allclose(ops.sz, np.diag([0.5, -0.5]))
    np.testing.assert_allclose(spin_matrices(Spin(2)).sz, np.diag([1, 0, -1]))


@pytest.mark.parametrize("twice_s", range(0, 13))
def test_commutators_and_casimir(twice_s):
    ops = spin_matrices(Spin(twice_s))
    sx, sy, sz = ops.sx, ops.sy, ops.sz
    for a, b, c in ((sx, sy, sz), (sy, sz, sx), (sz, sx, sy)):
        np.testing.assert_allclose(a @ b - b @ a, 1j * c, atol=1e-12)
    s = twice_s / 2
    np.testing.assert_allclose(sx @ sx + sy @ sy + sz @ sz, s * (s + 1) * np.eye(twice_s + 1), atol=1e-12)
    np.testing.assert_allclose(sx, oracles.ladder_matrices(twice_s)[0], atol=1e-14)


@pytest.mark.parametrize("twice_s", range(1, 9))
def test_two_pi_rotation_sign(twice_s, rng):
    ops = spin_matrices(Spin(twice_s))
    for _ in range(5):
        n = rng.standard_normal(3)
        n /= np.linalg.norm(n)
        u = expm(-2j * math.pi * ops.along(n))
        np.testing.assert_allclose(u, (-1) ** twice_s * np.eye(twice_s + 1), atol=1e-10)


def test_spin_expectation_examples(tetra):
    for twice_s in range(1, 7):
        top = basis_state(Spin(twice_s), Fraction(twice_s, 2))
        np.testing.assert_allclose(spin_expectation(top), [0, 0, twice_s / 2], atol=1e-15)
    np.testing.assert_allclose(spin_expectation(tetra), 0, atol=1e-12)
    np.testing.assert_allclose(spin_expectation(basis_state(Spin(2), 0)), 0, atol=1e-15)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 10), st.integers(0, 2**32 - 1))
def test_expectation_linearity(twice_s, seed):
    rng = np.random.default_rng(seed)
    psi = make_state(Spin(twice_s), oracles.random_state(rng, twice_s))
    n = rng.standard_normal(3)
    n /= np.linalg.norm(n)
    direct = np.vdot(psi.amplitudes, spin_matrices(psi.spin).along(n) @ psi.amplitudes).real
    assert abs(direct - n @ spin_expectation(psi)) < 1e-12


def test_clebsch_gordan_known_values():
    h = Fraction(1, 2)
    assert clebsch_gordan(h, h, h, -h, 1, 0) == pytest.approx(1 / SQ2)
    assert clebsch_gordan(h, h, h, -h, 0, 0) == pytest.approx(1 / SQ2)
    assert clebsch_gordan(h, -h, h, h, 0, 0) == pytest.approx(-1 / SQ2)
    assert clebsch_gordan(1, 1, 1, -1, 0, 0) == pytest.approx(1 / math.sqrt(3))
    assert clebsch_gordan(1, 0, 1, 0, 0, 0) == pytest.approx(-1 / math.sqrt(3))
    assert clebsch_gordan(1, 0, 1, 0, 1, 0) == pytest.approx(0.0)
    assert clebsch_gordan(1, 1, 1, 0, 2, 1) == pytest.approx(1 / SQ2)
    assert clebsch_gordan(1, 1, 1, 1, 1, 2) == 0.0


def test_clebsch_gordan_orthogonality():
    j1 = j2 = Fraction(3, 2)
    for J in range(0, 4):
        for Jp in range(0, 4):
            total = 0.0
            for m1 in (Fraction(k, 2) for k in (-3, -1, 1, 3)):
                m2 = -m1
                total += clebsch_gordan(j1, m1, j2, m2, J, 0) * clebsch_gordan(j1, m1, j2, m2, Jp, 0)
            assert total == pytest.approx(1.0 if J == Jp else 0.0, abs=1e-14)


def test_anticoherence_examples(tetra):
    assert anticoherence_order(tetra) == 2
    assert anticoherence_order(basis_state(Spin(2), 0)) == 1
    for twice_s in (1, 2, 4, 6):
        assert anticoherence_order(basis_state(Spin(twice_s), Fraction(twice_s, 2))) == 0


def test_anticoherence_m0_oracle():
    # <(n.S)^2> = 1 - n_z^2 for |1,0>, so the second moment varies with direction
    psi = basis_state(Spin(2), 0).amplitudes
    assert oracles.moment_spread(psi, 1, n_dirs=100) < 1e-12
    assert oracles.moment_spread(psi, 2, n_dirs=100) > 0.1


STATES = {
    "tetra": catalog.tetrahedral_state,
    "octa": catalog.octahedral_state,
    "cube": catalog.cube_state,
    "ghz2": lambda: catalog.ghz_state(2),
    "m0-3": lambda: catalog.m0_state(3),
    "coherent": lambda: catalog.coherent_state(2, (1, 1, 0)),
}


@pytest.mark.parametrize("name", STATES)
def test_multipole_matches_direction_sampling(name):
    psi = STATES[name]()
    order = anticoherence_order(psi)
    amps = psi.amplitudes
    for r in range(1, min(4, psi.twice_s) + 1):
        spread = oracles.moment_spread(amps, r, n_dirs=100)
        if r <= order:
            assert spread < 1e-9, (r, spread)
        elif r == order + 1:
            assert spread > 1e-6, (r, spread)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_order_one_iff_zero_expectation(twice_s, seed):
    rng = np.random.default_rng(seed)
    psi = make_state(Spin(twice_s), oracles.random_state(rng, twice_s))
    assert (anticoherence_order(psi) >= 1) == bool(np.linalg.norm(spin_expectation(psi)) < 1e-9)


def test_multipole_moments_rank_one_is_spherical_spin():
    psi = catalog.coherent_state(1, (0, 0, 1))
    t1 = multipole_moments(psi, 1)
    assert t1.shape == (3,)
    assert np.count_nonzero(np.abs(t1) > 1e-12) == 1
