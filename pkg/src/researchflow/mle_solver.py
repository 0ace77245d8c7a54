"""Iterative experiment-code solver.

Each solver step proposes a batch of candidate modifications (REPLACE a whole
program or EDIT a line range of a base sampled uniformly from the pool of top
programs), executes them in the sandbox with the dataset code prepended,
repairs failures a bounded number of times, scores survivors on a 0-to-1
scale, self-reflects on the outcome, and offers the batch's best candidate to
the bounded pool, replacing the lowest-scoring entry when better. The pool
maximum can therefore never decrease.
"""

from __future__ import annotations

import hashlib
import json
import logging
import random
import shutil
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import prompts
from .core import Command, CommandKind, Config, parse_command
from .errors import (ExperimentsFailedError, MalformedEditError,
                     NoCommandError, RangeError, RepairExhaustedError)
from .gateway import ChatRequest, Gateway
from .tools import ExecutionResult, Sandbox

logger = logging.getLogger(__name__)

PREDICTIONS_FILE = "dev_predictions.json"

# appended in held-out scoring mode so the program's dev predictions can be
# read back out of the scratch directory
_PREDICTIONS_EPILOGUE = f"""
try:
    import json as _rf_json
    with open({PREDICTIONS_FILE!r}, "w") as _rf_fh:
        _rf_json.dump([float(_rf_x) for _rf_x in dev_predictions], _rf_fh)
except NameError:
    pass
"""


# ---------------------------------------------------------------------------
# Edit algebra
# ---------------------------------------------------------------------------

def apply_edit(lines: list[str], n: int, m: int,
               new_lines: list[str]) -> list[str]:
    """Replace lines n through m inclusive with ``new_lines``.

    The result has len(lines) - (m - n + 1) + len(new_lines) lines.
    Raises RangeError unless 0 <= n <= m < len(lines).
    """
    if n < 0 or n > m or m >= len(lines):
        raise RangeError(f"edit range {n}..{m} invalid for {len(lines)} lines")
    return list(lines[:n]) + list(new_lines) + list(lines[m + 1:])


# ---------------------------------------------------------------------------
# Candidates and the pool
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProgramCandidate:
    lines: tuple[str, ...]
    score: float | None = None
    output: str = ""
    compiled: bool = False

    def __post_init__(self):
        if self.score is not None:
            if not self.compiled:
                raise ValueError("a scored candidate must have compiled")
            if not 0.0 <= self.score <= 1.0:
                raise ValueError(f"score out of range: {self.score}")

    @property
    def code(self) -> str:
        return "\n".join(self.lines)


class CandidatePool:
    """Bounded, score-sorted set of the best programs seen so far."""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError("pool capacity must be >= 1")
        self.capacity = capacity
        self.entries: list[ProgramCandidate] = []

    def __len__(self) -> int:
        return len(self.entries)

    def offer(self, candidate: ProgramCandidate) -> bool:
        """Insert below capacity, else replace the lowest-scoring entry if
        strictly better; score ties keep the incumbent."""
        if candidate.score is None:
            raise ValueError("only scored candidates may enter the pool")
        if len(self.entries) < self.capacity:
            self.entries.append(candidate)
            self._sort()
            return True
        if candidate.score > self.entries[-1].score:
            self.entries[-1] = candidate
            self._sort()
            return True
        return False

    def _sort(self) -> None:
        self.entries.sort(key=lambda c: c.score, reverse=True)

    def sample(self, rng: random.Random) -> ProgramCandidate:
        if not self.entries:
            raise IndexError("cannot sample from an empty pool")
        return self.entries[rng.randrange(len(self.entries))]

    def best(self) -> ProgramCandidate | None:
        return self.entries[0] if self.entries else None

    def max_score(self) -> float | None:
        return self.entries[0].score if self.entries else None

    def check_invariants(self) -> None:
        assert len(self.entries) <= self.capacity
        assert all(e.score is not None for e in self.entries)
        scores = [e.score for e in self.entries]
        assert scores == sorted(scores, reverse=True)


@dataclass
class SolverState:
    pool: CandidatePool
    error_history: list[str] = field(default_factory=list)
    code_history: list[str] = field(default_factory=list)
    reflection: str = ""
    prev_command: str = "None"
    step: int = 0

    def note_error(self, entry: str, cap: int) -> None:
        self.error_history.append(entry)
        del self.error_history[:-cap]

    def note_code(self, code: str, cap: int) -> None:
        self.code_history.append(code)
        del self.code_history[:-cap]


# ---------------------------------------------------------------------------
# Scoring modes
# ---------------------------------------------------------------------------

MetricFn = Callable[[np.ndarray, np.ndarray], float]


@dataclass(frozen=True)
class LLMReward:
    plan: str


@dataclass(frozen=True)
class HeldOutMetric:
    dev_inputs: np.ndarray
    dev_labels: np.ndarray
    metric: MetricFn

    def __post_init__(self):
        if len(self.dev_inputs) == 0 or len(self.dev_labels) == 0:
            raise ValueError("dev arrays must be non-empty")
        if len(self.dev_inputs) != len(self.dev_labels):
            raise ValueError("dev arrays must be aligned")


ScoringMode = LLMReward | HeldOutMetric


def split_train_dev(inputs, labels, seed: int):
    """Split off a 20% random dev sample; the remaining 80% stays training.

    Returns (train_inputs, train_labels, dev_inputs, dev_labels).
    """
    inputs = np.asarray(inputs)
    labels = np.asarray(labels)
    if len(inputs) != len(labels):
        raise ValueError("inputs and labels must be aligned")
    n = len(inputs)
    n_dev = max(1, round(0.2 * n))
    perm = np.random.default_rng(seed).permutation(n)
    dev_idx, train_idx = perm[:n_dev], perm[n_dev:]
    return (inputs[train_idx], labels[train_idx],
            inputs[dev_idx], labels[dev_idx])


def accuracy_metric(labels, predictions) -> float:
    labels = np.asarray(labels)
    predictions = np.asarray(predictions)
    if len(labels) != len(predictions):
        return 0.0
    return float(np.mean(labels == predictions))


# ---------------------------------------------------------------------------
# Solver
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SolverContext:
    plan: str
    insights: str
    notes: str
    dataset_code: str


@dataclass
class SolveResult:
    best: ProgramCandidate
    trace: list[dict]
    pool_max_trace: list[float]

    def trace_hash(self) -> str:
        canonical = json.dumps(self.trace, sort_keys=True)
        return hashlib.sha256(canonical.encode()).hexdigest()


class ExperimentSolver:
    def __init__(self, config: Config, gateway: Gateway, sandbox: Sandbox,
                 context: SolverContext, mode: ScoringMode,
                 rng: random.Random | None = None,
                 artifacts_dir: str | Path | None = None):
        self.config = config
        self.gateway = gateway
        self.sandbox = sandbox
        self.context = context
        self.mode = mode
        self.rng = rng or random.Random(0)
        self.artifacts_dir = Path(artifacts_dir) if artifacts_dir else None
        self.state = SolverState(pool=CandidatePool(config.max_top_codes))
        self.trace: list[dict] = []
        self.pool_max_trace: list[float] = []
        self.repair_calls_last_candidate = 0

    # -- prompts ------------------------------------------------------------

    def _command_descriptions(self) -> str:
        return "\n".join([prompts.REPLACE_CODE_TOOL, prompts.EDIT_CODE_TOOL,
                          prompts.SOLVER_COMMAND_DESCRIPTION])

    def _system_prompt(self) -> str:
        return prompts.solver_system_prompt(
            insights=self.context.insights,
            code_reflect=self.state.reflection,
            notes=self.context.notes,
            plan=self.context.plan,
            dataset_descr=prompts.dataset_description_prompt(
                self.context.dataset_code),
            command_descriptions=self._command_descriptions(),
        )

    def _error_history_block(self) -> str:
        return prompts.error_history_block("\n".join(self.state.error_history))

    def _user_prompt(self, base: ProgramCandidate | None, bootstrap: bool) -> str:
        if bootstrap:
            return prompts.initial_code_prompt(self._error_history_block())
        listing = numbered_lines(base.lines if base else ())
        return (f"{self._error_history_block()}\n"
                f"The following is the current code:\n{listing}\n"
                f"Your previous command was: {self.state.prev_command}. Make"
                " sure your new output is different.\n"
                "Please produce a single command below:")

    def _complete(self, system: str, user: str, temperature: float,
                  label: str) -> str:
        return self.gateway.complete(
            ChatRequest(model_id=self.config.model_id, system=system,
                        user=user, temperature=temperature,
                        max_output_tokens=self.config.max_output_tokens),
            label=label)

    # -- pipeline stages ----------------------------------------------------

    def propose(self, base: ProgramCandidate | None,
                bootstrap: bool) -> Command | None:
        """Ask for one EDIT or REPLACE command; the bootstrap step must
        REPLACE (there is nothing to edit yet). Bounded re-asks on a
        malformed or missing command; None means the candidate failed."""
        temperature = (self.config.initial_code_temperature if bootstrap
                       else self.config.solver_temperature)
        system = self._system_prompt()
        user = self._user_prompt(base, bootstrap)
        asks = 1 + self.config.comparison_trials
        for _ in range(asks):
            response = self._complete(system, user, temperature, "solver:propose")
            try:
                command = parse_command(
                    response, allowed={CommandKind.EDIT, CommandKind.REPLACE})
            except (NoCommandError, MalformedEditError):
                continue
            if bootstrap and command.kind is not CommandKind.REPLACE:
                continue
            self.state.prev_command = (
                f"EDIT {command.edit_from} {command.edit_to}"
                if command.kind is CommandKind.EDIT else "REPLACE")
            return command
        return None

    def execute_candidate(self, lines: tuple[str, ...]) -> tuple[ExecutionResult, list | None]:
        """Run dataset code + candidate; returns the result and, in held-out
        mode, the dev predictions the program wrote (if any)."""
        program = self.context.dataset_code + "\n" + "\n".join(lines)
        if isinstance(self.mode, HeldOutMetric):
            program += _PREDICTIONS_EPILOGUE
        scratch = Path(tempfile.mkdtemp(prefix="rf-candidate-"))
        try:
            result = self.sandbox.execute(
                program, self.config.experiment_timeout, artifacts_dir=scratch)
            predictions = None
            predictions_path = scratch / PREDICTIONS_FILE
            if predictions_path.exists():
                try:
                    predictions = json.loads(predictions_path.read_text())
                except json.JSONDecodeError:
                    predictions = None
            if self.artifacts_dir is not None:
                self.artifacts_dir.mkdir(parents=True, exist_ok=True)
                for png in scratch.glob("*.png"):
                    shutil.copy2(png, self.artifacts_dir / png.name)
            return result, predictions
        finally:
            shutil.rmtree(scratch, ignore_errors=True)

    @staticmethod
    def _error_text(result: ExecutionResult, timeout: float) -> str:
        if result.timed_out:
            return f"execution timed out after {timeout:g} seconds"
        return result.error or "unknown execution failure"

    def repair(self, lines: tuple[str, ...],
               error: str) -> tuple[tuple[str, ...], ExecutionResult, list | None]:
        """Up to repair_attempts repair completions; first clean run wins."""
        self.repair_calls_last_candidate = 0
        current_error = error
        for _ in range(self.config.repair_attempts):
            self.repair_calls_last_candidate += 1
            response = self._complete(
                prompts.REPAIR_SYSTEM_PROMPT,
                prompts.repair_prompt(current_error, "\n".join(lines)),
                self.config.repair_temperature, "solver:repair")
            try:
                command = parse_command(response,
                                        allowed={CommandKind.EXECUTE_CODE})
            except NoCommandError:
                continue
            candidate_lines = tuple(command.body.split("\n"))
            result, predictions = self.execute_candidate(candidate_lines)
            if not result.failed:
                return candidate_lines, result, predictions
            lines = candidate_lines
            current_error = self._error_text(result,
                                             self.config.experiment_timeout)
        raise RepairExhaustedError(current_error)

    def score_candidate(self, code: str, output: str,
                        predictions: list | None = None) -> float:
        """LLM-reward mode parses a SCORE fence (re-asking a bounded number
        of times; out-of-range and malformed values are rejected, never
        clamped). Held-out mode runs the metric on the program's dev
        predictions. Worst case is always 0.0."""
        if isinstance(self.mode, HeldOutMetric):
            if predictions is None:
                return 0.0
            value = self.mode.metric(self.mode.dev_labels, predictions)
            return min(1.0, max(0.0, float(value)))
        system = prompts.SCORING_SYSTEM_PROMPT
        user = prompts.scoring_prompt(self.mode.plan, code, output)
        asks = 1 + self.config.comparison_trials
        for _ in range(asks):
            response = self._complete(system, user,
                                      self.config.score_temperature,
                                      "solver:score")
            value = parse_score(response)
            if value is not None:
                return value
        return 0.0

    def reflect(self, code: str, error: str | None) -> str:
        """Produce and store a self-reflection on the last outcome; a
        gateway failure yields an empty reflection and the solver moves on."""
        if error is not None:
            system = prompts.SOLVER_ROLE
            user = prompts.code_error_reflection_prompt(code, error)
        else:
            system = prompts.reflective_feedback_system_prompt(
                "\n\n".join(self.state.code_history))
            user = (prompts.code_success_reflection_prompt(code) + "\n"
                    + prompts.REFLECTIVE_FEEDBACK_PROMPT)
        try:
            reflection = self._complete(system, user,
                                        self.config.solver_temperature,
                                        "solver:reflect")
        except Exception as exc:  # reflection is best-effort
            logger.warning("reflection failed, continuing: %s", exc)
            reflection = ""
        self.state.reflection = reflection
        return reflection

    # -- batches ------------------------------------------------------------

    def _run_candidate(self, bootstrap: bool) -> ProgramCandidate | None:
        base = None
        if not bootstrap and len(self.state.pool):
            base = self.state.pool.sample(self.rng)
        command = self.propose(base, bootstrap)
        record = {"step": self.state.step, "command": None, "diff": "",
                  "compiled": False, "score": None, "reflection_digest": ""}
        if command is None:
            record["diff"] = "no command"
            self.trace.append(record)
            return None
        record["command"] = command.kind.name
        new_lines = tuple(command.body.split("\n"))
        if command.kind is CommandKind.REPLACE:
            lines = new_lines
            record["diff"] = f"replace with {len(new_lines)} lines"
        else:
            base_lines = list(base.lines) if base else []
            record["diff"] = (f"edit {command.edit_from}..{command.edit_to}"
                              f" +{len(new_lines)}")
            try:
                lines = tuple(apply_edit(base_lines, command.edit_from,
                                         command.edit_to, list(new_lines)))
            except RangeError as exc:
                self.state.note_error(
                    prompts.error_history_entry(self.state.prev_command,
                                                str(exc)),
                    self.config.error_history_len)
                self.trace.append(record)
                return None
        result, predictions = self.execute_candidate(lines)
        if result.failed:
            error = self._error_text(result, self.config.experiment_timeout)
            try:
                lines, result, predictions = self.repair(lines, error)
            except RepairExhaustedError as exc:
                self.state.note_error(
                    prompts.error_history_entry(self.state.prev_command,
                                                str(exc)),
                    self.config.error_history_len)
                digest = self.reflect("\n".join(lines), str(exc))
                record["reflection_digest"] = digest[:80]
                self.trace.append(record)
                return None
        code = "\n".join(lines)
        score = self.score_candidate(code, result.stdout, predictions)
        self.state.note_code(code, self.config.code_history_len)
        digest = self.reflect(code, None)
        candidate = ProgramCandidate(lines=lines, score=score,
                                     output=result.stdout, compiled=True)
        record.update(compiled=True, score=score,
                      reflection_digest=digest[:80])
        self.trace.append(record)
        return candidate

    def step_batch(self) -> None:
        """One solver step: N independent candidates, best offered to the
        pool (insert below capacity, else replace the minimum if strictly
        better). A batch with zero successes leaves the pool unchanged."""
        bootstrap = len(self.state.pool) == 0
        candidates = []
        for _ in range(self.config.comparison_trials):
            candidate = self._run_candidate(bootstrap)
            if candidate is not None:
                candidates.append(candidate)
        if candidates:
            best = max(candidates, key=lambda c: c.score)
            self.state.pool.offer(best)
        self.state.pool.check_invariants()
        self.state.step += 1
        current_max = self.state.pool.max_score()
        if current_max is not None:
            self.pool_max_trace.append(current_max)

    def solve(self) -> SolveResult:
        for _ in range(self.config.solver_steps):
            self.step_batch()
        best = self.state.pool.best()
        if best is None or not best.compiled:
            raise ExperimentsFailedError(
                "no candidate ever compiled within the step budget")
        return SolveResult(best=best, trace=self.trace,
                           pool_max_trace=self.pool_max_trace)


def parse_score(response: str) -> float | None:
    """Extract a SCORE fence holding a decimal in [0, 1], else None."""
    try:
        command = parse_command(response, allowed={CommandKind.SCORE})
    except (NoCommandError, MalformedEditError):
        return None
    body = command.body.strip()
    try:
        value = float(body)
    except ValueError:
        return None
    if value != value or not 0.0 <= value <= 1.0:  # reject NaN and range
        return None
    return value


def numbered_lines(lines) -> str:
    return "\n".join(f"{i} |{line}" for i, line in enumerate(lines))
