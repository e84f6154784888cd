"""Oscillating time-periodic feedback for bracket-generating control systems.

The package synthesizes the feedback from a gain, a sampling period, index
sets selecting fields and brackets, and resonance-free integer frequency
multipliers; simulates the sampled closed loop; and empirically certifies
practical or exponential decay of the trajectories.
"""

from .analysis import (
    StabilityReport,
    certify_exponential,
    certify_practical,
    sweep_summary,
)
from .controller import ControlLaw, ControlSample, evaluate, max_magnitude, prepare_sample
from .errors import (
    ConfigError,
    DimensionMismatch,
    EvaluationError,
    KappaSearchError,
    KappaStructureError,
    OscstabError,
    SingularityError,
)
from .jets import Jet2, SmoothVectorField, directional_derivative
from .liealg import (
    BracketMatrix,
    IndexSets,
    assemble_F,
    check_rank,
    feedback_coefficients,
    lie_bracket,
    lie_bracket_field,
)
from .resonance import (
    KappaAssignment,
    ResonanceCertificate,
    find_resonance,
    search_kappa,
    validate_kappa,
)
from .simulator import (
    ControlSystem,
    DriftModel,
    Trajectory,
    drift_eval,
    monitor_bounds,
    pi_eps_solve,
)
from .systems import (
    SCENARIOS,
    Scenario,
    front_wheel_car,
    load_scenario,
    sampled_integrator,
    underwater_vehicle,
    underwater_vehicle_cubic_drift,
)

__version__ = "0.1.0"

__all__ = [
    "BracketMatrix",
    "ConfigError",
    "ControlLaw",
    "ControlSample",
    "ControlSystem",
    "DimensionMismatch",
    "DriftModel",
    "EvaluationError",
    "IndexSets",
    "Jet2",
    "KappaAssignment",
    "KappaSearchError",
    "KappaStructureError",
    "OscstabError",
    "ResonanceCertificate",
    "SCENARIOS",
    "Scenario",
    "SingularityError",
    "SmoothVectorField",
    "StabilityReport",
    "Trajectory",
    "assemble_F",
    "certify_exponential",
    "certify_practical",
    "check_rank",
    "directional_derivative",
    "drift_eval",
    "evaluate",
    "feedback_coefficients",
    "front_wheel_car",
    "lie_bracket",
    "lie_bracket_field",
    "load_scenario",
    "max_magnitude",
    "monitor_bounds",
    "pi_eps_solve",
    "prepare_sample",
    "sampled_integrator",
    "search_kappa",
    "sweep_summary",
    "underwater_vehicle",
    "underwater_vehicle_cubic_drift",
    "validate_kappa",
]
