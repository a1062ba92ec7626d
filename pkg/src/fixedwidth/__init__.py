"""Cost-aware fixed-width confidence intervals for a difference of two proportions."""

from .procedures import PROCEDURES, InitialStage, ProcedureOutcome
from .stats import ConfidenceInterval, CostModel, SampleState, TargetSpec

__version__ = "0.1.0"

__all__ = ["PROCEDURES", "ConfidenceInterval", "CostModel", "InitialStage", "ProcedureOutcome",
           "SampleState", "TargetSpec", "__version__"]
