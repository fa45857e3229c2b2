"""Scenario runner, CSV/SVG output and configuration for the command line."""

from .scenarios import (
    SCENARIOS,
    ArcFrame,
    RunArtifact,
    ScenarioSpec,
    default_spec,
    emit_arc_frames,
    load_spec,
    run_scenario,
)

__all__ = [
    "SCENARIOS",
    "ArcFrame",
    "RunArtifact",
    "ScenarioSpec",
    "default_spec",
    "emit_arc_frames",
    "load_spec",
    "run_scenario",
]
