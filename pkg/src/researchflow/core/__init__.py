from .commands import Command, CommandKind, parse_command, serialize_command
from .config import Config, config_from_dict, load_config
from .prompting import (AgentContext, RenderedPrompt, decay_history,
                        history_to_string, nudge_threshold, render_prompt)
from .types import (AgentHistory, DatasetCode, HistoryEntry, Interpretation,
                    LiteratureReview, Mode, PhaseId, PhaseOutput, Plan,
                    ResearchTask, ReviewedPaper)

__all__ = [
    "AgentContext",
    "AgentHistory",
    "Command",
    "CommandKind",
    "Config",
    "DatasetCode",
    "HistoryEntry",
    "Interpretation",
    "LiteratureReview",
    "Mode",
    "PhaseId",
    "PhaseOutput",
    "Plan",
    "RenderedPrompt",
    "ResearchTask",
    "ReviewedPaper",
    "config_from_dict",
    "decay_history",
    "history_to_string",
    "load_config",
    "nudge_threshold",
    "parse_command",
    "render_prompt",
    "serialize_command",
]
