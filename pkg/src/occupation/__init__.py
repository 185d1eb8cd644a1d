from .checks import PairingResult, TightnessResult, pairing_test, tightness_check
from .measures import MeasureSplit, OccupationMeasure, first_moment, occupation_measure, split_at_radius
from .trajectory import Trajectory, extract_optimal_curve, extract_optimal_curves, representation_value

__all__ = [
    "PairingResult",
    "TightnessResult",
    "pairing_test",
    "tightness_check",
    "MeasureSplit",
    "OccupationMeasure",
    "first_moment",
    "occupation_measure",
    "split_at_radius",
    "Trajectory",
    "extract_optimal_curve",
    "extract_optimal_curves",
    "representation_value",
]
