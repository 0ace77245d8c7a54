from .events import Event, EventLog
from .pipeline import (AutoProceed, DecisionProvider, GateHub, HubGate,
                       PipelineRunner, Toolbox, parse_refinement_decision,
                       resume_runner)
from .state import (HumanDecision, PhaseStats, RunState, RunStatus,
                    load_run_config, load_state, save_config, save_state,
                    success_rates)

__all__ = [
    "AutoProceed",
    "DecisionProvider",
    "Event",
    "EventLog",
    "GateHub",
    "HubGate",
    "HumanDecision",
    "PhaseStats",
    "PipelineRunner",
    "RunState",
    "RunStatus",
    "Toolbox",
    "load_run_config",
    "load_state",
    "parse_refinement_decision",
    "resume_runner",
    "save_config",
    "save_state",
    "success_rates",
]
