"""The seven-phase pipeline driver.

Phases run strictly in order; each one's output feeds the later phases'
context prompts. After every phase the checkpoint gate runs: autonomous mode
always proceeds, co-pilot mode blocks until a human decision arrives (retry
re-runs the phase with the human's notes injected into its prompts). After
report writing, the refinement loop may rewind to an earlier phase, bounded
by a rewind budget. State is saved at every phase boundary and gate decision.
"""

from __future__ import annotations

import json
import logging
import random
import threading
import time
from dataclasses import dataclass
from decimal import Decimal
from pathlib import Path
from typing import Protocol

from .. import prompts
from ..agents import (AgentRole, ROLE_PROFILES, Transcript, data_preparation,
                      literature_review, make_dialogue_agents,
                      run_dialogue_phase)
from ..core import (CommandKind, Config, Mode, PhaseId, ResearchTask)
from ..errors import (ConflictError, PhaseFailedError, ResearchFlowError)
from ..gateway import ChatRequest, Gateway
from ..mle_solver import ExperimentSolver, LLMReward, ScoringMode, SolverContext
from ..paper_solver import (PaperDoc, ReportContext, ReportSolver, Review,
                            mean_overall, reviews_to_text)
from ..tools import ArxivClient, HubClient, Sandbox, compile_latex
from .events import EventLog
from .state import (HumanDecision, PhaseStats, RunState, RunStatus,
                    save_config, save_state)

logger = logging.getLogger(__name__)

REWINDABLE = (PhaseId.PLAN_FORMULATION, PhaseId.DATA_PREPARATION,
              PhaseId.RUNNING_EXPERIMENTS, PhaseId.RESULTS_INTERPRETATION)


class DecisionProvider(Protocol):
    def decide(self, state: RunState, phase: PhaseId,
               output_summary: dict) -> HumanDecision: ...


class AutoProceed:
    def decide(self, state, phase, output_summary) -> HumanDecision:
        return HumanDecision.proceed_now()


class GateHub:
    """Blocking mailbox for co-pilot decisions, one writer wins.

    Decisions are idempotent by decision id: re-posting the same id returns
    quietly, while a second distinct decision for the same gate conflicts.
    """

    def __init__(self):
        self._cond = threading.Condition()
        self._pending: PhaseId | None = None
        self._decision: HumanDecision | None = None
        self._seen_ids: set[str] = set()

    @property
    def pending(self) -> PhaseId | None:
        with self._cond:
            return self._pending

    def request(self, phase: PhaseId) -> None:
        with self._cond:
            self._pending = phase
            self._decision = None
            self._cond.notify_all()

    def post(self, phase: PhaseId, decision: HumanDecision) -> None:
        with self._cond:
            if decision.decision_id in self._seen_ids:
                return
            if self._pending is None or self._pending is not phase:
                raise ConflictError(
                    f"run is not awaiting a decision for {phase.label}")
            if self._decision is not None:
                raise ConflictError("gate already decided")
            self._seen_ids.add(decision.decision_id)
            self._decision = decision
            self._cond.notify_all()

    def wait(self, timeout: float | None) -> HumanDecision | None:
        deadline = None if timeout is None else time.monotonic() + timeout
        with self._cond:
            while self._decision is None:
                remaining = None
                if deadline is not None:
                    remaining = deadline - time.monotonic()
                    if remaining <= 0:
                        return None
                self._cond.wait(remaining if remaining is not None else 1.0)
            decision = self._decision
            self._pending = None
            self._decision = None
            return decision


class HubGate:
    """DecisionProvider backed by a GateHub (control API, tests)."""

    def __init__(self, hub: GateHub, timeout: float | None = None):
        self.hub = hub
        self.timeout = timeout

    def decide(self, state, phase, output_summary) -> HumanDecision:
        self.hub.request(phase)
        decision = self.hub.wait(self.timeout)
        if decision is None:
            # unattended co-pilot runs fall through to proceed
            return HumanDecision.proceed_now()
        return decision


@dataclass
class Toolbox:
    arxiv: ArxivClient
    hub: HubClient
    sandbox: Sandbox


class PipelineRunner:
    def __init__(self, task: ResearchTask, config: Config, gateway: Gateway,
                 toolbox: Toolbox, run_dir: str | Path, run_id: str,
                 gate: DecisionProvider | None = None,
                 events: EventLog | None = None,
                 state: RunState | None = None,
                 scoring_mode: ScoringMode | None = None):
        self.task = task
        self.config = config
        self.gateway = gateway
        self.toolbox = toolbox
        self.run_dir = Path(run_dir)
        self.run_id = run_id
        self.gate = gate or AutoProceed()
        self.events = events or EventLog(run_id,
                                         self.run_dir / "events.jsonl")
        self.state = state or RunState(run_id=run_id, task=task)
        self.scoring_mode = scoring_mode
        self.artifacts_dir = self.run_dir / "artifacts"
        self._phase_impls = {
            PhaseId.LITERATURE_REVIEW: self._run_literature_review,
            PhaseId.PLAN_FORMULATION: self._run_plan_formulation,
            PhaseId.DATA_PREPARATION: self._run_data_preparation,
            PhaseId.RUNNING_EXPERIMENTS: self._run_experiments,
            PhaseId.RESULTS_INTERPRETATION: self._run_interpretation,
            PhaseId.REPORT_WRITING: self._run_report_writing,
            PhaseId.REPORT_REFINEMENT: self._run_report_refinement,
        }

    # -- context assembly ----------------------------------------------------

    def _out(self, phase: PhaseId, key: str, default: str = "") -> str:
        return self.state.outputs.get(phase, {}).get(key, default)

    def _lit_review_str(self) -> str:
        papers = self.state.outputs.get(
            PhaseId.LITERATURE_REVIEW, {}).get("papers", [])
        return "\n".join(f"arXiv ID: {p['arxiv_id']}, Summary: {p['summary']}"
                         for p in papers)

    def _sr_str(self) -> str:
        prev = self.state.previous_round
        if not prev:
            return ""
        return prompts.second_round_str(
            prev_results_code=prev.get("exp_code", ""),
            prev_exp_results=prev.get("exp_results", ""),
            prev_interpretation=prev.get("interpretation", ""),
            prev_report=prev.get("report", ""),
            reviewer_response=prev.get("reviewer_response", ""),
        )

    def _context(self, phase_context: str) -> str:
        return prompts.context_prompt(self._sr_str(), phase_context)

    def _phase_notes(self, phase: PhaseId) -> str:
        return "\n".join(self.task.notes_for(phase))

    def _rng(self, phase: PhaseId) -> random.Random:
        return random.Random(
            f"{self.task.seed}:{phase.label}:{self.state.attempt[phase]}")

    # -- phase implementations -------------------------------------------

    def _run_literature_review(self, transcript: Transcript) -> dict:
        review = literature_review(self.task, self.config, self.gateway,
                                   self.toolbox.arxiv, transcript)
        return {
            "papers": [{"arxiv_id": p.arxiv_id, "summary": p.summary}
                       for p in review.papers],
            "degraded": review.degraded,
        }

    def _run_plan_formulation(self, transcript: Transcript) -> dict:
        context = self._context(
            prompts.plan_formulation_context(self._lit_review_str()))
        driver, partner = make_dialogue_agents(PhaseId.PLAN_FORMULATION,
                                               self.config, context)
        plan = run_dialogue_phase(PhaseId.PLAN_FORMULATION, driver, partner,
                                  CommandKind.PLAN, self.task, self.config,
                                  self.gateway, transcript)
        return {"text": plan.text}

    def _run_data_preparation(self, transcript: Transcript) -> dict:
        dataset = data_preparation(
            self.task, self.config, self.gateway, self.toolbox.sandbox,
            self.toolbox.hub,
            lit_review_summary=self._context(self._lit_review_str()),
            plan=self._out(PhaseId.PLAN_FORMULATION, "text"),
            transcript=transcript)
        (self.run_dir / "dataset_code.py").write_text(dataset.code)
        return {"code": dataset.code}

    def _run_experiments(self, transcript: Transcript) -> dict:
        plan = self._out(PhaseId.PLAN_FORMULATION, "text")
        context = SolverContext(
            plan=plan,
            insights=self._context(self._lit_review_str()),
            notes=self._phase_notes(PhaseId.RUNNING_EXPERIMENTS),
            dataset_code=self._out(PhaseId.DATA_PREPARATION, "code"),
        )
        solver = ExperimentSolver(
            config=self.config, gateway=self.gateway,
            sandbox=self.toolbox.sandbox, context=context,
            mode=self.scoring_mode or LLMReward(plan=plan),
            rng=self._rng(PhaseId.RUNNING_EXPERIMENTS),
            artifacts_dir=self.artifacts_dir)
        try:
            result = solver.solve()
        except ResearchFlowError as exc:
            raise PhaseFailedError(PhaseId.RUNNING_EXPERIMENTS, str(exc))
        trace_path = self.run_dir / "solver_trace.jsonl"
        with trace_path.open("a") as fh:
            for record in result.trace:
                fh.write(json.dumps(record, sort_keys=True) + "\n")
        (self.run_dir / "experiment_code.py").write_text(result.best.code)
        return {
            "code": result.best.code,
            "output": result.best.output,
            "score": result.best.score,
            "pool_max_trace": result.pool_max_trace,
            "trace_hash": result.trace_hash(),
        }

    def _run_interpretation(self, transcript: Transcript) -> dict:
        context = self._context(prompts.results_interpretation_context(
            lit_review_summary=self._lit_review_str(),
            plan=self._out(PhaseId.PLAN_FORMULATION, "text"),
            dataset_code=self._out(PhaseId.DATA_PREPARATION, "code"),
            results_code=self._out(PhaseId.RUNNING_EXPERIMENTS, "code"),
            exp_results=self._out(PhaseId.RUNNING_EXPERIMENTS, "output"),
        ))
        driver, partner = make_dialogue_agents(PhaseId.RESULTS_INTERPRETATION,
                                               self.config, context)
        interpretation = run_dialogue_phase(
            PhaseId.RESULTS_INTERPRETATION, driver, partner,
            CommandKind.INTERPRETATION, self.task, self.config, self.gateway,
            transcript)
        return {"text": interpretation.text}

    def _report_solver(self) -> ReportSolver:
        context = ReportContext(
            topic=self.task.topic,
            plan=self._out(PhaseId.PLAN_FORMULATION, "text"),
            exp_code=self._out(PhaseId.RUNNING_EXPERIMENTS, "code"),
            exp_results=self._out(PhaseId.RUNNING_EXPERIMENTS, "output"),
            insights=self._out(PhaseId.RESULTS_INTERPRETATION, "text"),
            lit_review_str=self._lit_review_str(),
            notes=self._context(self._phase_notes(PhaseId.REPORT_WRITING)),
        )
        return ReportSolver(config=self.config, gateway=self.gateway,
                            arxiv=self.toolbox.arxiv, context=context,
                            artifacts_dir=self.artifacts_dir)

    def _run_report_writing(self, transcript: Transcript) -> dict:
        solver = self._report_solver()
        try:
            doc, reviews = solver.solve_paper()
        except ResearchFlowError as exc:
            raise PhaseFailedError(PhaseId.REPORT_WRITING, str(exc))
        report_path = self.run_dir / "report.tex"
        report_path.write_text(doc.source)
        compile_result = compile_latex(doc.source,
                                       compiler=self.config.latex_compiler,
                                       resource_dir=self.artifacts_dir)
        (self.run_dir / "report.compile.log").write_text(compile_result.log)
        (self.run_dir / "reviews.json").write_text(json.dumps(
            [r.raw for r in reviews], indent=2))
        return {
            "report": doc.source,
            "score": doc.score,
            "score_trace": solver.score_trace,
            "reviews": [self._review_json(r) for r in reviews],
        }

    @staticmethod
    def _review_json(review: Review) -> dict:
        return {"overall": review.overall, "decision": review.decision,
                "soundness": review.soundness, "confidence": review.confidence,
                "summary": review.summary,
                "weaknesses": list(review.weaknesses)}

    def _run_report_refinement(self, transcript: Transcript) -> dict:
        solver = self._report_solver()
        doc = PaperDoc.from_source(self._out(PhaseId.REPORT_WRITING, "report"))
        reviews = solver.review_paper(doc, self.config.refinement_reviewers)
        reviews_text = reviews_to_text(reviews)
        decision, target = self._refinement_decision(reviews_text)
        return {
            "decision": decision,
            "revisit": target.label if target else None,
            "reviews": [self._review_json(r) for r in reviews],
            "reviews_text": reviews_text,
            "mean_overall": mean_overall(reviews),
        }

    def _refinement_decision(self, reviews_text: str):
        """Ask the PhD agent to finalize or name an earlier phase to revisit;
        anything unparseable after bounded re-asks finalizes."""
        profile = ROLE_PROFILES[AgentRole.PHD_STUDENT]
        context = self._context(prompts.report_refinement_context(
            lit_review_summary=self._lit_review_str(),
            plan=self._out(PhaseId.PLAN_FORMULATION, "text"),
            dataset_code=self._out(PhaseId.DATA_PREPARATION, "code"),
            results_code=self._out(PhaseId.RUNNING_EXPERIMENTS, "code"),
            exp_results=self._out(PhaseId.RUNNING_EXPERIMENTS, "output"),
            interpretation=self._out(PhaseId.RESULTS_INTERPRETATION, "text"),
        ))
        system = prompts.base_system_prompt(
            profile.role_prompt,
            profile.phase_prompts[PhaseId.REPORT_REFINEMENT],
            prompts.REFINEMENT_DECISION_INSTRUCTIONS)
        user = prompts.refinement_decision_prompt(context, reviews_text)
        for _ in range(1 + self.config.comparison_trials):
            response = self.gateway.complete(
                ChatRequest(model_id=self.config.model_id, system=system,
                            user=user,
                            temperature=self.config.agent_temperature,
                            max_output_tokens=self.config.max_output_tokens),
                label="refinement:decision")
            decision = parse_refinement_decision(response)
            if decision is not None:
                return decision
        return "finalize", None

    # -- driver ----------------------------------------------------------

    def _save(self) -> None:
        self.state.gateway_calls = self.gateway.call_count
        save_state(self.state, self.run_dir)

    def _record_telemetry(self, phase: PhaseId, started: float,
                          cost_before: Decimal, succeeded: bool) -> None:
        stats = PhaseStats(
            phase=phase,
            wall_time=time.monotonic() - started,
            cost=self.gateway.ledger.total_cost() - cost_before,
            attempts=self.state.attempt[phase],
            succeeded=succeeded,
        )
        self.state.telemetry.append(stats)

    def _write_transcript(self, phase: PhaseId, attempt: int,
                          transcript: Transcript) -> None:
        path = self.run_dir / "transcripts" / (
            f"{phase.label.replace(' ', '_')}.attempt{attempt}.jsonl")
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w") as fh:
            for turn in transcript:
                fh.write(json.dumps(turn.__dict__, sort_keys=True) + "\n")

    def _output_summary(self, phase: PhaseId) -> dict:
        output = dict(self.state.outputs.get(phase, {}))
        # transcripts and artifacts live on disk; keep summaries small
        if "report" in output:
            output["report"] = output["report"][:2000]
        return output

    def _execute_phase(self, phase: PhaseId) -> bool:
        """One gated phase execution, including automatic retries.

        Returns True if the phase produced an accepted output.
        """
        retries_left = self.config.phase_retries
        while True:
            self.state.attempt[phase] += 1
            attempt = self.state.attempt[phase]
            started = time.monotonic()
            cost_before = self.gateway.ledger.total_cost()
            transcript = Transcript()
            self.events.append("phase_started",
                               {"phase": phase.label, "attempt": attempt})
            try:
                output = self._phase_impls[phase](transcript)
            except ResearchFlowError as exc:
                self._write_transcript(phase, attempt, transcript)
                self._record_telemetry(phase, started, cost_before, False)
                self.events.append("phase_failed",
                                   {"phase": phase.label, "error": str(exc)})
                self._save()
                if retries_left > 0:
                    retries_left -= 1
                    logger.warning("phase %s failed (%s); retrying",
                                   phase.label, exc)
                    continue
                return False
            self._write_transcript(phase, attempt, transcript)
            # a retry discards the failed attempt's partial output entirely
            self.state.outputs[phase] = output
            self._record_telemetry(phase, started, cost_before, True)
            self.events.append("phase_completed", {"phase": phase.label})
            self._save()
            if self._gate_and_maybe_retry(phase):
                return True
            retries_left = self.config.phase_retries

    def _gate_and_maybe_retry(self, phase: PhaseId) -> bool:
        """Run the checkpoint gate; on retry, inject the notes into the
        phase's prompts and drop the rejected output. True means proceed."""
        decision = self._checkpoint(phase)
        if decision.proceed:
            return True
        notes = [n for n in decision.notes if n.strip()]
        self.task = self.task.with_extra_notes(phase, notes)
        self.state.task = self.task
        self.state.outputs.pop(phase, None)
        return False

    def _checkpoint(self, phase: PhaseId) -> HumanDecision:
        """Autonomous mode proceeds immediately; co-pilot publishes the
        output and blocks until a decision arrives."""
        if self.task.mode is Mode.AUTONOMOUS:
            return HumanDecision.proceed_now()
        self.state.status = RunStatus.AWAITING_DECISION
        self.state.pending_gate = phase
        self._save()
        self.events.append("gate_requested", {"phase": phase.label})
        decision = self.gate.decide(self.state, phase,
                                    self._output_summary(phase))
        self.state.status = RunStatus.RUNNING
        self.state.pending_gate = None
        self.events.append("gate_decided", {
            "phase": phase.label,
            "decision": "proceed" if decision.proceed else "retry",
            "notes": list(decision.notes),
        })
        self._save()
        return decision

    def run(self) -> RunState:
        if self.state.status in (RunStatus.COMPLETE, RunStatus.FAILED):
            return self.state
        save_config(self.config, self.run_dir)
        if not self.state.outputs and self.state.attempt[
                PhaseId.LITERATURE_REVIEW] == 0:
            self.events.append("run_started", {"topic": self.task.topic,
                                               "mode": self.task.mode.value})
        if self.state.status is RunStatus.AWAITING_DECISION:
            # killed while a gate was pending: re-request it
            pending = self.state.pending_gate or self.state.phase
            self.state.status = RunStatus.RUNNING
            self._gate_and_maybe_retry(pending)
        self._save()
        while self.state.status is RunStatus.RUNNING:
            phase = self.state.phase
            # an output already present for the current phase means this is
            # a resumed run whose phase finished before the kill
            ok = (phase in self.state.outputs) or self._execute_phase(phase)
            if not ok:
                self.state.status = RunStatus.FAILED
                self.state.failed_phase = phase
                self.events.append("run_failed", {"phase": phase.label})
                self._save()
                return self.state
            if phase is PhaseId.REPORT_REFINEMENT:
                output = self.state.outputs[phase]
                target = output.get("revisit")
                if (output["decision"] == "revisit" and target
                        and self.state.rewinds_used < self.config.rewind_budget):
                    self._rewind(PhaseId.from_label(target))
                    continue
                self.state.status = RunStatus.COMPLETE
                self.events.append("run_completed",
                                   {"cost": str(self.state.total_cost())})
                self._save()
                return self.state
            self.state.phase = phase.next()
            self._save()
        return self.state

    def _rewind(self, target: PhaseId) -> None:
        """Rewind the phase pointer, keeping the finished round's outputs as
        'previous' context for the new round."""
        self.state.previous_round = {
            "exp_code": self._out(PhaseId.RUNNING_EXPERIMENTS, "code"),
            "exp_results": self._out(PhaseId.RUNNING_EXPERIMENTS, "output"),
            "interpretation": self._out(PhaseId.RESULTS_INTERPRETATION, "text"),
            "report": self._out(PhaseId.REPORT_WRITING, "report"),
            "reviewer_response": self._out(PhaseId.REPORT_REFINEMENT,
                                           "reviews_text"),
        }
        self.state.rewinds_used += 1
        for phase in PhaseId.ordered():
            if phase.index >= target.index:
                self.state.outputs.pop(phase, None)
        self.state.phase = target
        self.events.append("rewound", {"to": target.label,
                                       "rewinds_used": self.state.rewinds_used})
        self._save()


def parse_refinement_decision(text: str):
    """Parse FINALIZE / REVISIT: <phase label>; None if neither is found."""
    lowered = text.lower()
    revisit_at = lowered.find("revisit")
    if revisit_at != -1:
        tail = lowered[revisit_at:]
        for phase in REWINDABLE:
            if phase.label in tail:
                return "revisit", phase
    if "finalize" in lowered:
        return "finalize", None
    return None


def resume_runner(run_dir: str | Path, gateway: Gateway, toolbox: Toolbox,
                  gate: DecisionProvider | None = None,
                  config: Config | None = None,
                  scoring_mode: ScoringMode | None = None) -> PipelineRunner:
    """Rebuild a runner from a persisted run directory.

    A scripted mock gateway is fast-forwarded to the persisted call count so
    the remaining behavior replays exactly; resuming a terminal run is a
    no-op read.
    """
    from .state import load_run_config, load_state

    run_dir = Path(run_dir)
    state = load_state(run_dir)
    config = config or load_run_config(run_dir)
    if state.status not in (RunStatus.COMPLETE, RunStatus.FAILED):
        from ..gateway import MockGateway
        if isinstance(gateway.client, MockGateway):
            gateway.client.seek(state.gateway_calls)
        gateway.call_count = state.gateway_calls
    events = EventLog(state.run_id, run_dir / "events.jsonl")
    return PipelineRunner(task=state.task, config=config, gateway=gateway,
                          toolbox=toolbox, run_dir=run_dir,
                          run_id=state.run_id, gate=gate, events=events,
                          state=state, scoring_mode=scoring_mode)
