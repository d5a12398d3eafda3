"""V-type three-level atom in an interacting-Fock-space cavity mode: dynamics and nonclassicality witnesses."""

__version__ = "0.1.0"

from .errors import ConfigError, DomainError, OverdampedError, TruncationError  # noqa: E402
from .evolution import AmplitudeSet, Mode, ModelParams, evolve, integrate_ode  # noqa: E402
from .ifs import CoherentSpec, CoherentStyle, Family, FieldVector, WeightSequence  # noqa: E402
from .sweep import SweepConfig, compare_modes, figure_preset, run_sweep  # noqa: E402
from .witnesses import mandel_q, mandel_q_closed, moments_exact, moments_paper, squeezing_opt  # noqa: E402

__all__ = [
    "AmplitudeSet",
    "CoherentSpec",
    "CoherentStyle",
    "ConfigError",
    "DomainError",
    "Family",
    "FieldVector",
    "Mode",
    "ModelParams",
    "OverdampedError",
    "SweepConfig",
    "TruncationError",
    "WeightSequence",
    "compare_modes",
    "evolve",
    "figure_preset",
    "integrate_ode",
    "mandel_q",
    "mandel_q_closed",
    "moments_exact",
    "moments_paper",
    "run_sweep",
    "squeezing_opt",
]
