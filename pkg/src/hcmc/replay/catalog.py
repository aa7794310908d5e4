"""Fixed roster of replay branches and the full verification entry point."""

from __future__ import annotations

from . import h_generic, h_unit, h_zero
from .engine import CaseReport, run_script

ROSTER: dict[str, tuple[str, ...]] = {
    "H0": tuple(s.label for s in h_zero.SCRIPTS),
    "generic": tuple(s.label for s in h_generic.SCRIPTS),
    "unit": tuple(s.label for s in h_unit.SCRIPTS),
}

_ALL_SCRIPTS = {s.label: s for s in (*h_zero.SCRIPTS, *h_generic.SCRIPTS, *h_unit.SCRIPTS)}


def replay_regime(regime: str) -> list[CaseReport]:
    if regime not in ROSTER:
        raise ValueError(f"unknown regime {regime!r}; expected one of {sorted(ROSTER)}")
    return [run_script(_ALL_SCRIPTS[label]) for label in ROSTER[regime]]


def replay_all() -> list[CaseReport]:
    """Run every branch of the classification, in roster order."""
    out: list[CaseReport] = []
    for regime in ("H0", "generic", "unit"):
        out.extend(replay_regime(regime))
    return out


def coverage_complete(reports: list[CaseReport]) -> bool:
    """Every roster label present exactly once."""
    labels = [r.label for r in reports]
    expected = [l for reg in ("H0", "generic", "unit") for l in ROSTER[reg]]
    return labels == expected
