import math

import numpy as np
import pytest

from topophase.majorana import state_to_constellation
from topophase.noiselab import (NoiseConfig, endpoint_error_study, homotopy_invariance_suite,
                                perturb_path, trial_rng)
from topophase.phase import geometric_phase, phase_distance
from topophase.rotor import (Rotor, compose, from_axis_angle, geodesic_path, quat_exp, step_angles,
                             wigner_d)
from topophase.spincore import Spin, basis_state, spin_matrices
from topophase.topo import detect_symmetry_group

R1 = from_axis_angle([0.0, 0.0, 1.0], 2 * math.pi / 3)


@pytest.fixture(scope="module")
def sym_path():
    return geodesic_path(R1, 4000)


def test_config_validation():
    with pytest.raises(ValueError):
        NoiseConfig(epsilon=-0.1)
    with pytest.raises(ValueError):
        NoiseConfig(n_trials=0)
    assert NoiseConfig(epsilons=[0.1, 0.2]).sweep() == (0.1, 0.2)
    assert NoiseConfig(epsilon=0.3).sweep() == (0.3,)


def test_trial_streams_are_independent_of_order():
    a = [trial_rng(5, 0, i).standard_normal(3) for i in range(6)]
    b = [trial_rng(5, 0, i).standard_normal(3) for i in reversed(range(6))][::-1]
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(trial_rng(5, 0, 0).standard_normal(3), trial_rng(5, 1, 0).standard_normal(3))


def test_perturb_zero_and_endpoints(sym_path):
    assert perturb_path(sym_path, 0.0, 1) is sym_path
    p = perturb_path(sym_path, 0.3, 7)
    np.testing.assert_array_equal(p.quats[0], sym_path.quats[0])
    np.testing.assert_array_equal(p.quats[-1], sym_path.quats[-1])
    offsets = np.array([2 * math.acos(min(1.0, abs(np.dot(a, b)))) for a, b in zip(p.quats, sym_path.quats)])
    assert offsets.max() == pytest.approx(0.3, rel=1e-3)
    free = perturb_path(sym_path, 0.3, 7, fixed_endpoints=False)
    assert not np.array_equal(free.quats[-1], sym_path.quats[-1])
    assert np.max(step_angles(p.quats)) < 0.01


def test_small_deformations_keep_phase(sym_path, tetra):
    for seed in range(50):
        geo = geometric_phase(perturb_path(sym_path, 0.05, seed), tetra).geometric
        assert phase_distance(geo, 2 * math.pi / 3) < 1e-5


def test_endpoint_study_zero_and_magnitudes(tetra):
    zero = endpoint_error_study(tetra, R1, NoiseConfig(epsilon=0.0, n_trials=10, seed=1))
    assert zero.mean_abs_error[0] < 1e-14 and zero.nhat_spread[0] < 1e-14
    rep = endpoint_error_study(tetra, R1, NoiseConfig(epsilon=0.1, n_trials=200, seed=1))
    assert 3e-3 <= rep.mean_abs_error[0] <= 3e-2
    assert 3e-4 <= rep.nhat_spread[0] <= 3e-3
    assert rep.alpha == pytest.approx(2 * math.pi / 3)


def test_endpoint_error_second_order_oracle(tetra):
    # |e^{-i a}<psi|e^{-i eps n.S} D(R)|psi> - 1| = |<psi|e^{-i eps n.S}|psi> - 1| ~ eps^2 <(n.S)^2> / 2
    n = np.array([0.3, -0.4, np.sqrt(0.75)])
    a = spin_matrices(tetra.spin).along(n)
    second = np.vdot(tetra.amplitudes, a @ a @ tetra.amplitudes).real
    eps = 1e-3
    r = compose(Rotor.from_array(quat_exp(n * eps)), R1)
    ov = np.vdot(tetra.amplitudes, wigner_d(tetra.spin, r) @ tetra.amplitudes)
    assert abs(ov * np.exp(-2j * math.pi / 3) - 1) == pytest.approx(eps**2 * second / 2, rel=1e-3)


def test_slope_and_monotone(tetra):
    cfg = NoiseConfig(n_trials=100, seed=3, epsilons=(0.02, 0.05, 0.1, 0.2))
    rep = endpoint_error_study(tetra, R1, cfg)
    assert abs(rep.fitted_slope - 2.0) < 0.15
    means, sems = np.array(rep.mean_abs_error), np.array(rep.mean_abs_error_stderr)
    assert np.all(np.diff(means) >= -2 * (sems[1:] + sems[:-1]))
    assert len(rep.trials) == 400


def test_determinism(tetra):
    cfg = NoiseConfig(n_trials=30, seed=11, epsilons=(0.05, 0.1))
    a = endpoint_error_study(tetra, R1, cfg).as_dict(include_trials=True)
    b = endpoint_error_study(tetra, R1, cfg).as_dict(include_trials=True)
    assert a == b
    c = endpoint_error_study(tetra, R1, NoiseConfig(n_trials=30, seed=12, epsilons=(0.05, 0.1)))
    assert c.mean_abs_error != a["mean_abs_error"]


def test_invariance_suite_parallel_matches_serial(tetra):
    group = detect_symmetry_group(state_to_constellation(tetra))
    cfg = NoiseConfig(epsilon=0.3, n_trials=3, n_samples=1500, seed=2)
    serial = homotopy_invariance_suite(tetra, group, cfg)
    parallel = homotopy_invariance_suite(tetra, group, cfg, workers=4)
    assert serial.as_dict() == parallel.as_dict()
    assert len(serial.elements) == 11
    assert serial.all_classes_unchanged
    assert serial.max_dev_from_alpha < 1e-5


def test_invariance_zero_amplitude(tetra):
    group = detect_symmetry_group(state_to_constellation(tetra))
    rep = homotopy_invariance_suite(tetra, group, NoiseConfig(epsilon=0.0, n_trials=2, n_samples=1000))
    assert rep.max_dev_from_undeformed == 0.0
    assert rep.max_dev_from_alpha <= max(rep.max_richardson, 1e-12)


def test_coherent_control_is_not_protected(tetra):
    group = detect_symmetry_group(state_to_constellation(tetra))
    rep = homotopy_invariance_suite(basis_state(Spin(4), 2), group,
                                    NoiseConfig(epsilon=0.3, n_trials=4, n_samples=1500, seed=0))
    assert rep.max_dev_from_undeformed > 1e-2
