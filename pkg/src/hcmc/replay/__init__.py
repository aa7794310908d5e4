"""Machine-checked replay of the classification case analysis."""

from .catalog import ROSTER, coverage_complete, replay_all, replay_regime
from .engine import (
    CaseReport,
    CaseScript,
    ScriptRun,
    StepFailure,
    Witness,
    fold_w_basis,
    run_script,
)
from .h_generic import replay_generic
from .h_unit import (
    factorability_conditions,
    replay_unit,
    verify_claim_linear,
    verify_claim_sum_derivatives,
)
from .h_zero import replay_minimal
from .intersection import DegenerateInput, IntersectionVerdict, finite_intersection_guard

__all__ = [
    "CaseReport",
    "CaseScript",
    "DegenerateInput",
    "IntersectionVerdict",
    "ROSTER",
    "ScriptRun",
    "StepFailure",
    "Witness",
    "coverage_complete",
    "factorability_conditions",
    "finite_intersection_guard",
    "fold_w_basis",
    "replay_all",
    "replay_generic",
    "replay_minimal",
    "replay_regime",
    "replay_unit",
    "run_script",
    "verify_claim_linear",
    "verify_claim_sum_derivatives",
]
