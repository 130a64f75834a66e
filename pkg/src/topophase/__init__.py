"""Geometric phases of rotated spin states and their topological protection."""

__version__ = "0.1.0"

from .errors import (BadAxis, DegenerateState, DimensionMismatch, NotAGroup,
                     NotASymmetry, NotClosedInOrbitSpace, ParseError, TopoPhaseError,
                     UndefinedPhase, UndersampledPath)
from .spincore import (Spin, SpinState, anticoherence_order, basis_state, make_state,
                       multipole_moments, spin_matrices)
from .rotor import (RotationPath, Rotor, from_axis_angle, geodesic_path, lift_path,
                    loop_about, resample_path, wigner_d)
from .majorana import (Constellation, MajoranaRoots, constellation_to_state,
                       majorana_polynomial, state_to_constellation)
from .phase import (PhaseReport, dynamical_phase, geometric_phase, stargazing_phase,
                    symmetry_eigenphase, total_phase)
from .topo import (BinaryGroup, CellDecomposition, HomotopyClass, PointGroup,
                   detect_symmetry_group, homotopy_class, lift_group, phase_representation,
                   predicted_phase)
from .noiselab import (NoiseConfig, ScalingReport, endpoint_error_study,
                       homotopy_invariance_suite, perturb_path)

__all__ = [
    "__version__",
    "BadAxis",
    "DegenerateState",
    "DimensionMismatch",
    "NotAGroup",
    "NotASymmetry",
    "NotClosedInOrbitSpace",
    "ParseError",
    "TopoPhaseError",
    "UndefinedPhase",
    "UndersampledPath",
    "Spin",
    "SpinState",
    "anticoherence_order",
    "basis_state",
    "make_state",
    "multipole_moments",
    "spin_matrices",
    "RotationPath",
    "Rotor",
    "from_axis_angle",
    "geodesic_path",
    "lift_path",
    "loop_about",
    "resample_path",
    "wigner_d",
    "Constellation",
    "MajoranaRoots",
    "constellation_to_state",
    "majorana_polynomial",
    "state_to_constellation",
    "PhaseReport",
    "dynamical_phase",
    "geometric_phase",
    "stargazing_phase",
    "symmetry_eigenphase",
    "total_phase",
    "BinaryGroup",
    "CellDecomposition",
    "HomotopyClass",
    "PointGroup",
    "detect_symmetry_group",
    "homotopy_class",
    "lift_group",
    "phase_representation",
    "predicted_phase",
    "NoiseConfig",
    "ScalingReport",
    "endpoint_error_study",
    "homotopy_invariance_suite",
    "perturb_path",
]
