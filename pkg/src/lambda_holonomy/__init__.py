"""Non-Abelian geometric phases of three-level Lambda systems.

Gauge connections of the Lambda eigenframe, path-ordered Wilson loops, and a
direct Schroedinger-equation cross-check of holonomy predictions.
"""

from .errors import (
    ChartSingularity,
    DimensionMismatch,
    InvalidParams,
    InvalidSpec,
    InvalidTime,
    IoFailure,
    LambdaHolonomyError,
    NotAntiHermitian,
    NotClosed,
    NotNormalized,
    StepTooLarge,
)
from .lambda_gauge import (
    ConnectionSample,
    LambdaParams,
    MagneticField,
    MixingAngles,
    connection,
    curvature,
    frame_matrix,
    gamma_angle,
    large_detuning_connection,
    reconstruct_hamiltonian,
)
from .holonomy import (
    CircleLoop,
    CompositeLoop,
    Holonomy,
    LissajousLoop,
    ParamLoop,
    discretize,
    loop_commutator_norm,
    solid_angle,
    wilson_loop,
)
from .dynamics import LoopSchedule, evolve, populations
from .experiments import ExperimentConfig, ScanRow, alpha_scan, composed_path_pd, emit, two_method_report

__version__ = "0.1.0"

__all__ = [
    "ChartSingularity",
    "DimensionMismatch",
    "InvalidParams",
    "InvalidSpec",
    "InvalidTime",
    "IoFailure",
    "LambdaHolonomyError",
    "NotAntiHermitian",
    "NotClosed",
    "NotNormalized",
    "StepTooLarge",
    "ConnectionSample",
    "LambdaParams",
    "MagneticField",
    "MixingAngles",
    "connection",
    "curvature",
    "frame_matrix",
    "gamma_angle",
    "large_detuning_connection",
    "reconstruct_hamiltonian",
    "CircleLoop",
    "CompositeLoop",
    "Holonomy",
    "LissajousLoop",
    "ParamLoop",
    "discretize",
    "loop_commutator_norm",
    "solid_angle",
    "wilson_loop",
    "LoopSchedule",
    "evolve",
    "populations",
    "ExperimentConfig",
    "ScanRow",
    "alpha_scan",
    "composed_path_pd",
    "emit",
    "two_method_report",
]
