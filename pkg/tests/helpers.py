"""Random test paths."""
from __future__ import annotations

import numpy as np

from topophase.rotor import RotationPath, quat_exp


def random_smooth_path(rng, n_samples: int, max_angle: float = np.pi, n_modes: int = 4) -> RotationPath:
    """R(t) = exp(v(t)) for a random smooth rotation vector v with v(0) = 0, max |v| = max_angle."""
    t = np.linspace(0.0, 1.0, n_samples)
    k = np.arange(1, n_modes + 1)
    coeffs = rng.standard_normal((n_modes, 3)) / k[:, None]
    v = np.sin(np.pi * np.outer(t, k - 0.5)) @ coeffs
    v *= max_angle / np.max(np.linalg.norm(v, axis=1))
    return RotationPath(t, quat_exp(v))
