"""Monte Carlo robustness studies: path deformations and endpoint rotation errors.

Random streams: numpy's PCG64 bit generator, seeded per trial with
``SeedSequence(seed, spawn_key=(stream, trial))``. A trial's draws depend only
on (seed, stream, trial), so serial, parallel and reordered runs agree bitwise.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats

from .errors import NotASymmetry
from .phase import geometric_phase, phase_distance, symmetry_eigenphase
from .rotor import RotationPath, Rotor, geodesic_path, quat_exp, quat_multiply, wigner_d_many
from .spincore import SpinState
from .topo import PointGroup, homotopy_class, lift_group

RNG_ALGORITHM = "numpy.random.PCG64 via SeedSequence(seed, spawn_key=(stream, trial))"
# fits skip points whose mean error is within this factor of the noise floor
FIT_FLOOR_FACTOR = 10.0
MACHINE_FLOOR = 1e-14


@dataclass(frozen=True)
class NoiseConfig:
    epsilon: float = 0.1
    n_modes: int = 8
    n_trials: int = 20
    seed: int = 0
    n_samples: int = 4000
    epsilons: tuple = ()

    def __post_init__(self):
        if self.epsilon < 0 or any(e < 0 for e in self.epsilons):
            raise ValueError("epsilon must be non-negative")
        if self.n_trials < 1:
            raise ValueError("n_trials must be at least 1")
        if self.n_modes < 1:
            raise ValueError("n_modes must be at least 1")
        object.__setattr__(self, "epsilons", tuple(float(e) for e in self.epsilons))

    def sweep(self) -> tuple:
        return self.epsilons or (float(self.epsilon),)


def trial_rng(seed: int, stream: int, trial: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(stream), int(trial)))
    return np.random.Generator(np.random.PCG64(ss))


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.PCG64(seed))
    return np.random.Generator(np.random.PCG64(int(seed)))


def perturb_path(path: RotationPath, amplitude: float, seed, fixed_endpoints: bool = True,
                 n_modes: int = 8) -> RotationPath:
    """Right-multiply each sample by exp of a random smooth rotation-vector field.

    The field is a sine series (mode k weighted 1/k) scaled so its largest
    rotation angle equals ``amplitude``. It vanishes at t = 0, and also at
    t = 1 when ``fixed_endpoints``.
    """
    if amplitude < 0:
        raise ValueError("amplitude must be non-negative")
    if amplitude == 0:
        return path
    rng = _as_rng(seed)
    k = np.arange(1, n_modes + 1)
    coeffs = rng.standard_normal((n_modes, 3)) / k[:, None]
    t = path.times
    freq = k if fixed_endpoints else k - 0.5
    basis = np.sin(np.pi * np.outer(t, freq))
    field = basis @ coeffs
    peak = np.max(np.linalg.norm(field, axis=1))
    if peak > 0:
        field *= amplitude / peak
    quats = quat_multiply(path.quats, quat_exp(field))
    quats[0] = path.quats[0]
    if fixed_endpoints:
        quats[-1] = path.quats[-1]
    return RotationPath(path.times, quats)


@dataclass
class ScalingReport:
    epsilons: list
    mean_abs_error: list
    nhat_spread: list
    fitted_slope: float
    slope_stderr: float
    mean_abs_error_stderr: list = field(default_factory=list)
    mean_arg_error: list = field(default_factory=list)
    arg_spread: list = field(default_factory=list)
    arg_fitted_slope: float = math.nan
    spread_fitted_slope: float = math.nan
    alpha: float = math.nan
    trials: list = field(default_factory=list, repr=False)

    def as_dict(self, include_trials: bool = False) -> dict:
        d = asdict(self)
        if not include_trials:
            d.pop("trials")
        return d


def _loglog_fit(x, y, floor: float) -> tuple[float, float]:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    keep = (x > 0) & (y > FIT_FLOOR_FACTOR * floor)
    if keep.sum() < 2:
        return math.nan, math.nan
    if keep.sum() == 2:
        lx, ly = np.log(x[keep]), np.log(y[keep])
        return float((ly[1] - ly[0]) / (lx[1] - lx[0])), math.nan
    fit = stats.linregress(np.log(x[keep]), np.log(y[keep]))
    return float(fit.slope), float(fit.stderr)


def _diameter(points: np.ndarray) -> float:
    """Largest pairwise distance among complex numbers."""
    if points.size < 2:
        return 0.0
    return float(np.max(np.abs(points[:, None] - points[None, :])))


def random_directions(config: NoiseConfig, stream: int = 0) -> np.ndarray:
    out = np.empty((config.n_trials, 3))
    for i in range(config.n_trials):
        v = trial_rng(config.seed, stream, i).standard_normal(3)
        out[i] = v / np.linalg.norm(v)
    return out


def endpoint_error_study(psi: SpinState, r_m: Rotor, config: NoiseConfig,
                         epsilons=None) -> ScalingReport:
    """Phase-factor error of <psi| D(exp(-i eps n.S) R_m) |psi> against e^{i alpha_m}.

    Per trial the error is |e^{-i alpha_m} <psi|R|psi> - 1|; the n-dependent part
    is the spread (largest pairwise distance) of those complex deviations over
    the sampled directions n. Directions are shared across the epsilon sweep.
    """
    alpha = symmetry_eigenphase(psi, r_m)
    eps_list = [float(e) for e in (epsilons if epsilons is not None else config.sweep())]
    nhat = random_directions(config)
    amps = psi.amplitudes
    means, spreads, sems, arg_means, arg_spreads, trials = [], [], [], [], [], []
    for e in eps_list:
        err_q = quat_exp(nhat * e)
        quats = quat_multiply(err_q, r_m.as_array()[None, :])
        mats = wigner_d_many(psi.spin, quats)
        ov = np.einsum("i,nij,j->n", amps.conj(), mats, amps)
        dev = ov * np.exp(-1j * alpha) - 1.0
        err = np.abs(dev)
        arg_err = phase_distance(np.angle(ov), alpha)
        means.append(float(np.mean(err)))
        sems.append(float(np.std(err, ddof=1) / math.sqrt(len(err))) if len(err) > 1 else 0.0)
        spreads.append(_diameter(dev))
        arg_means.append(float(np.mean(arg_err)))
        arg_spreads.append(float(np.ptp(arg_err)))
        for i in range(len(err)):
            trials.append({"epsilon": e, "trial": i, "nx": nhat[i, 0], "ny": nhat[i, 1],
                           "nz": nhat[i, 2], "re_dev": float(dev[i].real),
                           "im_dev": float(dev[i].imag), "abs_error": float(err[i]),
                           "arg_error": float(arg_err[i])})
    slope, stderr = _loglog_fit(eps_list, means, MACHINE_FLOOR)
    arg_slope, _ = _loglog_fit(eps_list, arg_means, MACHINE_FLOOR)
    spread_slope, _ = _loglog_fit(eps_list, spreads, MACHINE_FLOOR)
    return ScalingReport(eps_list, means, spreads, slope, stderr, sems, arg_means,
                         arg_spreads, arg_slope, spread_slope, alpha, trials)


@dataclass
class ElementSummary:
    index: int
    axis: list
    angle: float
    alpha: float | None
    undeformed_phase: float
    max_dev_from_alpha: float
    max_dev_from_undeformed: float
    max_richardson: float
    classes_unchanged: bool


@dataclass
class InvarianceSummary:
    elements: list
    max_dev_from_alpha: float
    max_dev_from_undeformed: float
    max_richardson: float
    all_classes_unchanged: bool

    def as_dict(self) -> dict:
        return asdict(self)


def _one_element(psi, r, index, bg, config, workers) -> ElementSummary:
    path = geodesic_path(r, config.n_samples)
    try:
        alpha = symmetry_eigenphase(psi, r)
    except NotASymmetry:
        alpha = None
    base = geometric_phase(path, psi)
    cls0 = homotopy_class(path, bg).representative

    def trial(i):
        deformed = perturb_path(path, config.epsilon, trial_rng(config.seed, index, i),
                                fixed_endpoints=True, n_modes=config.n_modes)
        rep = geometric_phase(deformed, psi)
        same = homotopy_class(deformed, bg).representative.is_close(cls0, 1e-9)
        return rep, same

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(trial, range(config.n_trials)))
    else:
        results = [trial(i) for i in range(config.n_trials)]
    geos = np.array([rep.geometric for rep, _ in results])
    rich = max([base.richardson_error_estimate] + [rep.richardson_error_estimate for rep, _ in results])
    axis, angle = r.axis_angle()
    return ElementSummary(
        index=index, axis=axis.tolist(), angle=angle, alpha=alpha,
        undeformed_phase=base.geometric,
        max_dev_from_alpha=float(np.max(phase_distance(geos, alpha))) if alpha is not None else math.nan,
        max_dev_from_undeformed=float(np.max(phase_distance(geos, base.geometric))),
        max_richardson=float(rich),
        classes_unchanged=all(same for _, same in results))


def homotopy_invariance_suite(psi: SpinState, group: PointGroup, config: NoiseConfig,
                              include_identity: bool = False, workers: int = 1) -> InvarianceSummary:
    """Deform every symmetry path with fixed endpoints and track the geometric phase.

    Each non-identity element R_m of the group is reached by the SU(2) geodesic
    from the identity; ``config.epsilon`` is the deformation amplitude. When R_m
    is not a symmetry of ``psi`` (control runs) only the deviation from the
    undeformed path is meaningful.
    """
    bg = lift_group(group)
    rows = []
    for index, r in enumerate(group.elements):
        if r.is_close(Rotor.identity(), 1e-12) and not include_identity:
            continue
        rows.append(_one_element(psi, r, index, bg, config, workers))
    alpha_devs = [row.max_dev_from_alpha for row in rows if row.alpha is not None]
    return InvarianceSummary(
        elements=rows,
        max_dev_from_alpha=max(alpha_devs) if alpha_devs else math.nan,
        max_dev_from_undeformed=max(row.max_dev_from_undeformed for row in rows),
        max_richardson=max(row.max_richardson for row in rows),
        all_classes_unchanged=all(row.classes_unchanged for row in rows))
