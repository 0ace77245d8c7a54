"""Autonomous research pipeline: LLM-agent phases from topic to report.

A run moves through seven ordered phases (literature review, plan
formulation, data preparation, running experiments, results interpretation,
report writing, report refinement), producing experiment code and a compiled
report. Runs are fully autonomous or gated by a human at per-phase
checkpoints, and every component can be driven offline by a scripted mock
gateway for deterministic replays.
"""

__version__ = "0.1.0"
