"""Role-playing agents and the dialogue engines for the four agent phases.

Literature review loops a single PhD agent against the arXiv tools; plan
formulation and results interpretation alternate a submitting agent (the
postdoc, who holds the terminal command) with a PhD partner; data
preparation alternates an ML engineer (who runs code) with a PhD submitter.
All feedback an agent sees at step t derives from the command at step t-1.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

from . import prompts
from .core import (AgentContext, AgentHistory, CommandKind, Config,
                   DatasetCode, HistoryEntry, Interpretation,
                   LiteratureReview, PhaseId, Plan, ResearchTask,
                   ReviewedPaper, decay_history, parse_command, render_prompt,
                   serialize_command)
from .errors import (MalformedEditError, NetworkError, NoCommandError,
                     NotFoundError, PhaseFailedError, ResearchFlowError)
from .gateway import ChatRequest, Gateway
from .tools import (ArxivClient, HubClient, Sandbox, format_datasets,
                    format_summaries)

logger = logging.getLogger(__name__)


class AgentRole(enum.Enum):
    PHD_STUDENT = "phd student"
    POSTDOC = "postdoc"
    ML_ENGINEER = "ml engineer"
    SW_ENGINEER = "sw engineer"
    PROFESSOR = "professor"
    REVIEWER = "reviewer"


@dataclass(frozen=True)
class RoleProfile:
    role: AgentRole
    role_prompt: str
    phase_prompts: dict[PhaseId, str]
    command_sets: dict[PhaseId, frozenset[CommandKind]]
    command_descriptions: dict[PhaseId, str]


_K = CommandKind

ROLE_PROFILES: dict[AgentRole, RoleProfile] = {
    AgentRole.PHD_STUDENT: RoleProfile(
        role=AgentRole.PHD_STUDENT,
        role_prompt=prompts.PHD_ROLE,
        phase_prompts={
            PhaseId.LITERATURE_REVIEW: prompts.PHD_LIT_REVIEW_PHASE,
            PhaseId.PLAN_FORMULATION: prompts.PHD_PLAN_PHASE,
            PhaseId.DATA_PREPARATION: prompts.PHD_DATA_PREP_PHASE,
            PhaseId.RESULTS_INTERPRETATION: prompts.PHD_INTERPRETATION_PHASE,
            PhaseId.REPORT_REFINEMENT: prompts.PHD_REFINEMENT_PHASE,
        },
        command_sets={
            PhaseId.LITERATURE_REVIEW: frozenset(
                {_K.SUMMARY, _K.FULL_TEXT, _K.ADD_PAPER}),
            PhaseId.PLAN_FORMULATION: frozenset({_K.DIALOGUE}),
            PhaseId.DATA_PREPARATION: frozenset({_K.DIALOGUE, _K.SUBMIT_CODE}),
            PhaseId.RESULTS_INTERPRETATION: frozenset({_K.DIALOGUE}),
            PhaseId.REPORT_REFINEMENT: frozenset(),
        },
        command_descriptions={
            PhaseId.LITERATURE_REVIEW: prompts.PHD_LIT_REVIEW_COMMANDS,
            PhaseId.PLAN_FORMULATION: prompts.DIALOGUE_ONLY_COMMANDS,
            PhaseId.DATA_PREPARATION: prompts.PHD_DATA_PREP_COMMANDS,
            PhaseId.RESULTS_INTERPRETATION: prompts.DIALOGUE_ONLY_COMMANDS,
            PhaseId.REPORT_REFINEMENT:
                prompts.REFINEMENT_DECISION_INSTRUCTIONS,
        },
    ),
    AgentRole.POSTDOC: RoleProfile(
        role=AgentRole.POSTDOC,
        role_prompt=prompts.POSTDOC_ROLE,
        phase_prompts={
            PhaseId.PLAN_FORMULATION: prompts.POSTDOC_PLAN_PHASE,
            PhaseId.RESULTS_INTERPRETATION:
                prompts.POSTDOC_INTERPRETATION_PHASE,
        },
        command_sets={
            PhaseId.PLAN_FORMULATION: frozenset({_K.DIALOGUE, _K.PLAN}),
            PhaseId.RESULTS_INTERPRETATION: frozenset(
                {_K.DIALOGUE, _K.INTERPRETATION}),
        },
        command_descriptions={
            PhaseId.PLAN_FORMULATION: prompts.POSTDOC_PLAN_COMMANDS,
            PhaseId.RESULTS_INTERPRETATION:
                prompts.POSTDOC_INTERPRETATION_COMMANDS,
        },
    ),
    AgentRole.ML_ENGINEER: RoleProfile(
        role=AgentRole.ML_ENGINEER,
        role_prompt=prompts.ML_ENGINEER_ROLE,
        phase_prompts={
            PhaseId.DATA_PREPARATION: prompts.ML_ENGINEER_DATA_PREP_PHASE,
        },
        command_sets={
            PhaseId.DATA_PREPARATION: frozenset(
                {_K.EXECUTE_CODE, _K.DIALOGUE, _K.SEARCH_HF}),
        },
        command_descriptions={
            PhaseId.DATA_PREPARATION: prompts.ML_ENGINEER_DATA_PREP_COMMANDS,
        },
    ),
    AgentRole.SW_ENGINEER: RoleProfile(
        role=AgentRole.SW_ENGINEER,
        role_prompt=prompts.SW_ENGINEER_ROLE,
        phase_prompts={},
        command_sets={},
        command_descriptions={},
    ),
    AgentRole.PROFESSOR: RoleProfile(
        role=AgentRole.PROFESSOR,
        role_prompt=prompts.PROFESSOR_ROLE,
        phase_prompts={},
        command_sets={},
        command_descriptions={},
    ),
    AgentRole.REVIEWER: RoleProfile(
        role=AgentRole.REVIEWER,
        role_prompt=prompts.REVIEWER_SYSTEM_PROMPT,
        phase_prompts={},
        command_sets={},
        command_descriptions={},
    ),
}


@dataclass
class Turn:
    step: int
    role: str
    phase: str
    feedback: str
    response: str


class Transcript(list):
    """Ordered record of agent turns within one phase attempt."""

    def record(self, step: int, role: AgentRole, phase: PhaseId,
               feedback: str, response: str) -> None:
        self.append(Turn(step, role.value, phase.label, feedback, response))


class DialogueAgent:
    """One role-playing agent bound to a phase, with its own history."""

    def __init__(self, profile: RoleProfile, phase: PhaseId, config: Config,
                 context_prompt: str = ""):
        self.profile = profile
        self.phase = phase
        self.config = config
        self.context_prompt = context_prompt
        self.history = AgentHistory(bound=config.agent_history_len)

    @property
    def commands(self) -> frozenset[CommandKind]:
        return self.profile.command_sets[self.phase]

    def respond(self, gateway: Gateway, task: ResearchTask, step: int,
                feedback: str) -> str:
        ctx = AgentContext(
            role_description=self.profile.role_prompt,
            phase_prompt=self.profile.phase_prompts[self.phase],
            command_descriptions=self.profile.command_descriptions[self.phase],
            context_prompt=self.context_prompt,
            history=decay_history(self.history, self.config),
        )
        rendered = render_prompt(ctx, self.phase, step, feedback, task,
                                 self.config)
        return gateway.complete(
            ChatRequest(
                model_id=self.config.model_id,
                system=rendered.system,
                user=rendered.user,
                temperature=self.config.agent_temperature,
                max_output_tokens=self.config.max_output_tokens,
            ),
            label=f"{self.profile.role.value}:{self.phase.label}",
        )

    def remember(self, step: int, feedback: str, response: str,
                 command_text: str, full_text: bool = False) -> None:
        self.history.append(HistoryEntry(
            step=step, phase=self.phase, feedback=feedback,
            response=response, full_text=full_text))
        if command_text:
            self.history.prev_command = command_text


def _parse(agent: DialogueAgent, response: str):
    try:
        return parse_command(response, allowed=agent.commands), None
    except (NoCommandError, MalformedEditError):
        return None, prompts.NO_COMMAND_FEEDBACK


# ---------------------------------------------------------------------------
# Literature review
# ---------------------------------------------------------------------------

def literature_review(task: ResearchTask, config: Config, gateway: Gateway,
                      arxiv: ArxivClient,
                      transcript: Transcript | None = None) -> LiteratureReview:
    """Loop the PhD agent over search, full-text, and add-paper actions.

    Ends as soon as the configured number of papers has been added. Hitting
    the step budget with at least one paper yields a partial review flagged
    degraded; with none it is a phase failure.
    """
    phase = PhaseId.LITERATURE_REVIEW
    agent = DialogueAgent(ROLE_PROFILES[AgentRole.PHD_STUDENT], phase, config)
    transcript = transcript if transcript is not None else Transcript()
    papers: list[ReviewedPaper] = []
    feedback = ""
    for step in range(config.max_steps[phase]):
        response = agent.respond(gateway, task, step, feedback)
        transcript.record(step, agent.profile.role, phase, feedback, response)
        command, error = _parse(agent, response)
        next_is_full_text = False
        if command is None:
            next_feedback = error
        elif command.kind is CommandKind.SUMMARY:
            query = command.body.strip()
            if not query:
                next_feedback = "The search query was empty. Provide one."
            else:
                try:
                    next_feedback = format_summaries(arxiv.search(query, 20))
                except ResearchFlowError as exc:
                    next_feedback = f"arXiv search failed: {exc}. Try again."
        elif command.kind is CommandKind.FULL_TEXT:
            try:
                next_feedback = arxiv.full_text(command.body.strip())
                next_is_full_text = True
            except (NotFoundError, NetworkError) as exc:
                next_feedback = f"Could not retrieve full text: {exc}"
        else:  # ADD_PAPER: first body line is the id, the rest the summary
            lines = command.body.split("\n", 1)
            paper_id = lines[0].strip()
            summary = lines[1].strip() if len(lines) > 1 else ""
            papers.append(ReviewedPaper(arxiv_id=paper_id, summary=summary))
            next_feedback = (f"Paper {paper_id} added to the literature review"
                             f" ({len(papers)}/{config.lit_review_paper_target}).")
            if len(papers) >= config.lit_review_paper_target:
                agent.remember(step, feedback, response,
                               serialize_command(command))
                return LiteratureReview(papers=tuple(papers))
        agent.remember(step, feedback, response,
                       serialize_command(command) if command else "",
                       full_text=next_is_full_text)
        feedback = next_feedback
    if papers:
        logger.warning("literature review hit its step budget with %d/%d"
                       " papers; returning a degraded review", len(papers),
                       config.lit_review_paper_target)
        return LiteratureReview(papers=tuple(papers), degraded=True)
    raise PhaseFailedError(phase, "no papers were added within the step budget")


# ---------------------------------------------------------------------------
# Two-agent dialogue phases (plan formulation, results interpretation)
# ---------------------------------------------------------------------------

_TERMINAL_OUTPUT = {
    CommandKind.PLAN: Plan,
    CommandKind.INTERPRETATION: Interpretation,
}


def run_dialogue_phase(phase: PhaseId, driver: DialogueAgent,
                       partner: DialogueAgent, terminal: CommandKind,
                       task: ResearchTask, config: Config, gateway: Gateway,
                       transcript: Transcript | None = None):
    """Alternate driver and partner until the driver submits the terminal
    command; its body becomes the phase output. The terminal keyword from
    any agent whose command set lacks it is inert and the phase continues.
    """
    if phase not in (PhaseId.PLAN_FORMULATION, PhaseId.RESULTS_INTERPRETATION):
        raise ValueError(f"not a dialogue phase: {phase}")
    transcript = transcript if transcript is not None else Transcript()
    agents = [driver, partner]
    feedback = ""
    for step in range(config.max_steps[phase]):
        agent = agents[step % 2]
        response = agent.respond(gateway, task, step, feedback)
        transcript.record(step, agent.profile.role, phase, feedback, response)
        command, error = _parse(agent, response)
        if command is None:
            next_feedback = error
        elif command.kind is terminal:
            return _TERMINAL_OUTPUT[terminal](command.body)
        elif command.kind is CommandKind.DIALOGUE:
            next_feedback = command.body
        else:
            next_feedback = prompts.NO_COMMAND_FEEDBACK
        agent.remember(step, feedback, response,
                       serialize_command(command) if command else "")
        feedback = next_feedback
    raise PhaseFailedError(phase, f"no {terminal.keyword} command was"
                           " submitted within the step budget")


def make_dialogue_agents(phase: PhaseId, config: Config,
                         context_prompt: str) -> tuple[DialogueAgent, DialogueAgent]:
    """Driver (postdoc, terminal-command holder) and PhD partner."""
    driver = DialogueAgent(ROLE_PROFILES[AgentRole.POSTDOC], phase, config,
                           context_prompt)
    partner = DialogueAgent(ROLE_PROFILES[AgentRole.PHD_STUDENT], phase,
                            config, context_prompt)
    return driver, partner


# ---------------------------------------------------------------------------
# Data preparation
# ---------------------------------------------------------------------------

def check_compiles(code: str) -> str | None:
    """Syntax-compile submitted code; return the error text, or None."""
    try:
        compile(code, "<submission>", "exec")
    except SyntaxError as exc:
        return f"{exc.__class__.__name__}: {exc}"
    return None


def data_preparation(task: ResearchTask, config: Config, gateway: Gateway,
                     sandbox: Sandbox, hub: HubClient, lit_review_summary: str,
                     plan: str,
                     transcript: Transcript | None = None) -> DatasetCode:
    """ML engineer writes and runs dataset code; the PhD submits it.

    A submission is accepted only if it compiles; otherwise the compiler
    error is fed back and the loop continues.
    """
    phase = PhaseId.DATA_PREPARATION
    context = prompts.data_preparation_context(lit_review_summary, plan)
    engineer = DialogueAgent(ROLE_PROFILES[AgentRole.ML_ENGINEER], phase,
                             config, context)
    submitter = DialogueAgent(ROLE_PROFILES[AgentRole.PHD_STUDENT], phase,
                              config, context)
    transcript = transcript if transcript is not None else Transcript()
    agents = [engineer, submitter]
    feedback = ""
    for step in range(config.max_steps[phase]):
        agent = agents[step % 2]
        response = agent.respond(gateway, task, step, feedback)
        transcript.record(step, agent.profile.role, phase, feedback, response)
        command, error = _parse(agent, response)
        if command is None:
            next_feedback = error
        elif command.kind is CommandKind.DIALOGUE:
            next_feedback = command.body
        elif command.kind is CommandKind.EXECUTE_CODE:
            result = sandbox.execute(command.body, config.dataprep_timeout)
            parts = [f"Code output:\n{result.stdout}"]
            if result.timed_out:
                parts.append(f"Execution timed out after"
                             f" {config.dataprep_timeout:g} seconds.")
            elif result.error:
                parts.append(f"Error:\n{result.error}")
            next_feedback = "\n".join(parts)
        elif command.kind is CommandKind.SEARCH_HF:
            try:
                next_feedback = format_datasets(hub.search(command.body.strip()))
            except NetworkError as exc:
                next_feedback = f"Dataset search failed: {exc}. Try again."
        else:  # SUBMIT_CODE
            compile_error = check_compiles(command.body)
            if compile_error is None:
                return DatasetCode(command.body)
            next_feedback = (f"Submission rejected, the code does not"
                             f" compile: {compile_error}")
        agent.remember(step, feedback, response,
                       serialize_command(command) if command else "")
        feedback = next_feedback
    raise PhaseFailedError(phase, "no clean code submission within the"
                           " step budget")
