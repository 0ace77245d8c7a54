"""Acceptance suite: one test per release criterion, at fixed tolerances.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one PASS line per
criterion. Everything here is offline and deterministic.
"""

import hashlib
import json
import random
import string
import threading
import time
from decimal import Decimal
from pathlib import Path

import numpy as np
import pytest

from researchflow.core import (Command, CommandKind, Mode, PhaseId,
                               ResearchTask, parse_command, serialize_command)
from researchflow.errors import NoCommandError, RangeError
from researchflow.gateway import Gateway, MockGateway, PriceTable, UsageLedger
from researchflow.mle_solver import (ExperimentSolver, HeldOutMetric,
                                     LLMReward, SolverContext,
                                     accuracy_metric, apply_edit, parse_score,
                                     split_train_dev)
from researchflow.orchestrator import (GateHub, HubGate, HumanDecision,
                                       PipelineRunner, RunStatus, Toolbox)
from researchflow.paper_solver import (PaperDoc, ReportContext, ReportSolver,
                                       Section, parse_review)
from researchflow.tools import FixtureHubClient, Sandbox, compile_latex

from . import mockscripts
from .helpers import (SCAFFOLD_SOURCE, example_review_json, fence,
                      make_gateway, review_response, small_config)

PASS = "ACCEPTANCE {}: PASS"


# ---------------------------------------------------------------------------
# 1. command grammar
# ---------------------------------------------------------------------------

_BODY_ALPHABET = string.ascii_letters + string.digits + " _.,:;#{}()[]'\"\\-"


def _random_command(rng: random.Random) -> Command:
    kinds = [k for k in CommandKind if k is not CommandKind.EDIT]
    body_lines = []
    for _ in range(rng.randrange(0, 5)):
        line = "".join(rng.choice(_BODY_ALPHABET)
                       for _ in range(rng.randrange(0, 40)))
        body_lines.append(line)
    body = "\n".join(body_lines)
    if rng.random() < 0.25:
        return Command(CommandKind.EDIT, body,
                       edit_from=rng.randrange(0, 1000),
                       edit_to=rng.randrange(0, 1000))
    return Command(rng.choice(kinds), body)


def test_command_grammar_roundtrip_10k():
    rng = random.Random(20240101)
    started = time.monotonic()
    for i in range(10_000):
        command = _random_command(rng)
        assert parse_command(serialize_command(command)) == command
    # first-command-only rule over multi-fence concatenations
    for _ in range(1_000):
        commands = [_random_command(rng) for _ in range(rng.randrange(2, 5))]
        filler = "".join(rng.choice(" abcdef\n") for _ in range(20))
        blob = ("\n" + filler.replace("```", "") + "\n").join(
            serialize_command(c) for c in commands)
        assert parse_command(blob) == commands[0]
    elapsed = time.monotonic() - started
    assert elapsed < 5.0, f"grammar suite took {elapsed:.2f}s"
    print(PASS.format("command grammar round-trip (10k, <5s)"))


# ---------------------------------------------------------------------------
# 2. edit algebra
# ---------------------------------------------------------------------------

def _naive_splice(lines, n, m, new_lines):
    if n < 0 or n > m or m >= len(lines):
        return None
    out = []
    for i, line in enumerate(lines):
        if i == n:
            out.extend(new_lines)
        if n <= i <= m:
            continue
        out.append(line)
    return out


def test_edit_algebra_matches_oracle_10k():
    rng = random.Random(42)
    mismatches = 0
    for i in range(10_000):
        size = rng.randrange(1, 40)
        lines = [f"line-{j}" for j in range(size)]
        # bias toward boundaries and include invalid ranges
        n = rng.choice([0, size - 1, rng.randrange(-2, size + 2)])
        m = rng.choice([n, size - 1, rng.randrange(-2, size + 2)])
        new_lines = [f"new-{j}" for j in range(rng.randrange(0, 6))]
        expected = _naive_splice(lines, n, m, new_lines)
        try:
            actual = apply_edit(lines, n, m, new_lines)
        except RangeError:
            actual = None
        if actual != expected:
            mismatches += 1
        if expected is not None:
            assert len(actual) == len(lines) - (m - n + 1) + len(new_lines)
    assert mismatches == 0
    print(PASS.format("edit algebra vs splice oracle (10k, 0 mismatches)"))


# ---------------------------------------------------------------------------
# 3. solver pool over 100 scripted steps
# ---------------------------------------------------------------------------

def test_solver_pool_100_steps():
    rng = random.Random(7)
    config = small_config(solver_steps=100, comparison_trials=1,
                          max_top_codes=2, repair_attempts=2,
                          experiment_timeout=30.0)
    script = []
    planned = []  # per step: score or None (failure)
    for step in range(100):
        fail = rng.random() < 0.15 and step > 0
        if fail:
            script.append(fence("REPLACE", "raise ValueError('planned')"))
            script.append(fence("python", "raise ValueError('still')"))
            script.append(fence("python", "raise ValueError('still')"))
            script.append("error reflection")
            planned.append(None)
        else:
            score = round(rng.random(), 3)
            script.append(fence("REPLACE", "print('ok')"))
            script.append(fence("SCORE", f"{score}"))
            script.append("success reflection")
            planned.append(score)
    gateway = make_gateway(script)
    solver = ExperimentSolver(
        config=config, gateway=gateway, sandbox=Sandbox(),
        context=SolverContext(plan="p", insights="", notes="",
                              dataset_code=""),
        mode=LLMReward(plan="p"), rng=random.Random(1))
    result = solver.solve()

    # replace-lowest oracle
    pool: list[float] = []
    expected_max_trace = []
    for score in planned:
        if score is not None:
            if len(pool) < 2:
                pool.append(score)
            elif score > min(pool):
                pool[pool.index(min(pool))] = score
        if pool:
            expected_max_trace.append(max(pool))
    assert result.pool_max_trace == expected_max_trace
    assert all(a <= b for a, b in
               zip(result.pool_max_trace, result.pool_max_trace[1:]))
    assert len(solver.state.pool) <= 2
    actual_scores = sorted(c.score for c in solver.state.pool.entries)
    assert actual_scores == sorted(pool)
    assert solver.repair_calls_last_candidate <= 2
    repair_calls = sum(1 for e in gateway.ledger.entries
                       if e.label == "solver:repair")
    failures = sum(1 for s in planned if s is None)
    assert repair_calls == 2 * failures
    print(PASS.format("solver pool 100 steps (max nondecreasing, cap 2,"
                      " replace-lowest exact, repairs <= 2)"))


# ---------------------------------------------------------------------------
# 4. score parsing
# ---------------------------------------------------------------------------

def _mutated_score_responses(rng: random.Random):
    plain = ["0.75", "1.2", "-3", "abc", "nan", "inf", "0.5e400", "",
             "0.999", "1.0000001", "0", "1"]
    for _ in range(1000):
        choice = rng.random()
        if choice < 0.3:
            yield fence("SCORE", rng.choice(plain))
        elif choice < 0.5:
            yield fence("SCORE", f"{rng.uniform(-2, 3):.4f}")
        elif choice < 0.7:
            noise = "".join(rng.choice(_BODY_ALPHABET) for _ in range(30))
            yield f"no fences {noise}"
        elif choice < 0.85:
            yield fence(rng.choice(["score", "SCORES", "json"]), "0.5")
        else:
            yield (fence("SCORE", rng.choice(plain)) + "\n"
                   + fence("SCORE", rng.choice(plain)))


def test_score_parsing_contract_and_fuzz():
    assert parse_score("```SCORE\n0.75\n```") == 0.75

    # bounded re-asks: invalid, invalid, then valid third ask
    config = small_config(comparison_trials=2)
    gateway = make_gateway([fence("SCORE", "1.2"), fence("SCORE", "abc"),
                            fence("SCORE", "0.9")])
    solver = ExperimentSolver(
        config=config, gateway=gateway, sandbox=Sandbox(),
        context=SolverContext("p", "", "", ""), mode=LLMReward("p"))
    assert solver.score_candidate("c", "out") == 0.9
    assert gateway.call_count == 3  # 1 + at most comparison_trials re-asks

    rng = random.Random(99)
    for response in _mutated_score_responses(rng):
        gateway = make_gateway([response] * 3)
        solver = ExperimentSolver(
            config=config, gateway=gateway, sandbox=Sandbox(),
            context=SolverContext("p", "", "", ""), mode=LLMReward("p"))
        value = solver.score_candidate("c", "out")
        assert 0.0 <= value <= 1.0
    print(PASS.format("score parsing (0.75 exact, bounded re-asks, 1k fuzz"
                      " all in [0,1])"))


# ---------------------------------------------------------------------------
# 5. dev-split scoring mode
# ---------------------------------------------------------------------------

def test_dev_split_mode_exact():
    rng = np.random.default_rng(2024)
    inputs = rng.normal(size=(1000, 4))
    labels = (inputs[:, 0] > 0).astype(int)
    train_x, train_y, dev_x, dev_y = split_train_dev(inputs, labels, seed=11)
    assert len(train_x) == 800 and len(train_y) == 800
    assert len(dev_x) == 200 and len(dev_y) == 200

    mode = HeldOutMetric(dev_inputs=dev_x, dev_labels=dev_y,
                         metric=accuracy_metric)
    dataset_code = f"dev_labels = {dev_y.tolist()}"
    solver = ExperimentSolver(
        config=small_config(experiment_timeout=30.0),
        gateway=make_gateway([]), sandbox=Sandbox(),
        context=SolverContext("p", "", "", dataset_code), mode=mode)
    result, predictions = solver.execute_candidate(
        ("dev_predictions = list(dev_labels)",))
    assert result.error is None
    score = solver.score_candidate("c", result.stdout, predictions)
    assert score == 1.0
    print(PASS.format("dev split 800/200 exact; perfect predictor scores"
                      " 1.0 +- 0"))


# ---------------------------------------------------------------------------
# 6. sandbox
# ---------------------------------------------------------------------------

def test_sandbox_contract(tmp_path):
    sandbox = Sandbox()

    code = "print('setup')\nexit()\nprint('survived the exit call')\n"
    result = sandbox.execute(code, timeout=30)
    assert result.error is None and not result.timed_out
    assert "survived the exit call" in result.stdout

    result = sandbox.execute("while True:\n    pass\n", timeout=2)
    assert result.timed_out
    assert 1.0 <= result.duration <= 3.0

    watched = tmp_path / "watched"
    watched.mkdir()
    (watched / "data.txt").write_text("before")
    snapshot = {p.name: p.read_text() for p in watched.iterdir()}
    result = sandbox.execute(
        "open('inside.txt', 'w').write('scratch only')\nprint('ok')",
        timeout=30)
    assert result.error is None
    assert snapshot == {p.name: p.read_text() for p in watched.iterdir()}
    assert not (Path.cwd() / "inside.txt").exists()
    print(PASS.format("sandbox (exit stripped, 2s timeout kill in 2+-1s,"
                      " no writes outside scratch)"))


# ---------------------------------------------------------------------------
# 7. scaffold / report
# ---------------------------------------------------------------------------

def test_scaffold_and_review_fixture(tmp_path):
    solver = ReportSolver(
        config=small_config(), gateway=make_gateway(
            [fence("REPLACE", SCAFFOLD_SOURCE)]),
        arxiv=mockscripts.record_tool_fixtures(tmp_path / "ax"),
        context=ReportContext(topic="t", plan="p", exp_code="c",
                              exp_results="r", insights="i",
                              lit_review_str="l"),
        artifacts_dir=tmp_path / "artifacts")
    doc = solver.build_scaffold()
    assert list(doc.sections) == list(Section)
    assert compile_latex(doc.source, compiler="builtin").ok

    # committed edits compile at every state; broken ones leave it untouched
    intro_line = doc.source.split("\n").index("(INTRODUCTION HERE)")
    committed = solver.edit_paper(doc, Command(
        CommandKind.EDIT, "A paragraph.", edit_from=intro_line,
        edit_to=intro_line))
    assert solver.gate(committed.lines) is None
    with pytest.raises(Exception):
        solver.edit_paper(committed, Command(
            CommandKind.EDIT, "broken {", edit_from=intro_line,
            edit_to=intro_line))
    assert solver.gate(committed.lines) is None

    review = parse_review(example_review_json())
    assert review.overall == 7
    assert review.decision == "Accept"
    assert review.soundness == 3
    assert review.confidence == 4
    print(PASS.format("scaffold 8 sections compile-gated; example review"
                      " parses (7/Accept/3/4)"))


# ---------------------------------------------------------------------------
# 8. end-to-end determinism
# ---------------------------------------------------------------------------

def _autonomous_runner(tmp_path, run_id, script, config):
    return PipelineRunner(
        task=ResearchTask(topic="word order sensitivity", mode=Mode.AUTONOMOUS,
                          seed=13),
        config=config,
        gateway=Gateway(client=MockGateway(script),
                        ledger=UsageLedger(PriceTable.default())),
        toolbox=Toolbox(
            arxiv=mockscripts.record_tool_fixtures(tmp_path / "fixtures"),
            hub=FixtureHubClient(tmp_path / "hub"),
            sandbox=Sandbox()),
        run_dir=tmp_path / "runs" / run_id,
        run_id=run_id)


def _artifact_hash(run_dir: Path) -> str:
    digest = hashlib.sha256()
    for name in ("report.tex", "experiment_code.py", "dataset_code.py"):
        digest.update((run_dir / name).read_bytes())
    return digest.hexdigest()


def test_end_to_end_determinism(tmp_path):
    config = mockscripts.tiny_run_config()
    script = mockscripts.full_run_script(config)
    started = time.monotonic()

    runner_a = _autonomous_runner(tmp_path / "a", "e2e", script, config)
    state_a = runner_a.run()
    runner_b = _autonomous_runner(tmp_path / "b", "e2e", script, config)
    state_b = runner_b.run()
    elapsed = time.monotonic() - started

    for state, runner in ((state_a, runner_a), (state_b, runner_b)):
        assert state.status is RunStatus.COMPLETE
        assert len(state.telemetry) == 7
        assert [s.phase for s in state.telemetry] == list(PhaseId)
        assert state.total_cost() == runner.gateway.ledger.total_cost()
        report = (runner.run_dir / "report.tex").read_text()
        assert compile_latex(report, compiler="builtin").ok
    assert (_artifact_hash(tmp_path / "a" / "runs" / "e2e")
            == _artifact_hash(tmp_path / "b" / "runs" / "e2e"))
    assert elapsed < 60.0, f"two runs took {elapsed:.1f}s"
    print(PASS.format(f"end-to-end determinism (7 phases, exact cost ledger,"
                      f" identical hashes, {elapsed:.1f}s < 60s)"))


# ---------------------------------------------------------------------------
# 9. co-pilot gating
# ---------------------------------------------------------------------------

class _CaptureClient:
    def __init__(self, inner):
        self.inner = inner
        self.requests = []

    def complete(self, request):
        self.requests.append(request)
        return self.inner.complete(request)


def test_copilot_retry_note_and_gate_ordering(tmp_path):
    config = mockscripts.tiny_run_config()
    script = (mockscripts.lit_review_block(config) + mockscripts.plan_block()
              + mockscripts.plan_block() + mockscripts.dataprep_block()
              + mockscripts.experiments_block(config)
              + mockscripts.interpretation_block()
              + mockscripts.report_block(config)
              + mockscripts.refinement_block(config))
    hub = GateHub()
    client = _CaptureClient(MockGateway(script))
    runner = PipelineRunner(
        task=ResearchTask(topic="word order", mode=Mode.COPILOT, seed=3),
        config=config,
        gateway=Gateway(client=client,
                        ledger=UsageLedger(PriceTable.default())),
        toolbox=Toolbox(
            arxiv=mockscripts.record_tool_fixtures(tmp_path / "fx"),
            hub=FixtureHubClient(tmp_path / "hub"), sandbox=Sandbox()),
        run_dir=tmp_path / "runs" / "cp", run_id="cp",
        gate=HubGate(hub))
    thread = threading.Thread(target=runner.run, daemon=True)
    thread.start()

    retried = False
    while thread.is_alive():
        pending = hub.pending
        if pending is None:
            time.sleep(0.01)
            continue
        if pending is PhaseId.PLAN_FORMULATION and not retried:
            retried = True
            decision = HumanDecision.retry(["include paper X"])
        else:
            decision = HumanDecision.proceed_now()
        try:
            hub.post(pending, decision)
        except Exception:
            time.sleep(0.005)
    thread.join(timeout=60)
    assert runner.state.status is RunStatus.COMPLETE

    calls_with_note = [r for r in client.requests
                       if "include paper X" in r.user]
    assert calls_with_note, "retry note must appear in re-run prompts"

    kinds = [(e.kind, e.payload.get("phase"), e.payload.get("decision"))
             for e in runner.events.snapshot()]
    for i, phase in enumerate(PhaseId.ordered()[:-1]):
        proceed_at = kinds.index(("gate_decided", phase.label, "proceed"))
        next_start = kinds.index(
            ("phase_started", phase.next().label, None))
        assert next_start > proceed_at, (
            f"{phase.next().label} started before {phase.label} proceed")
    print(PASS.format("co-pilot gating (retry note in prompts; no"
                      " later-phase work before proceed)"))


# ---------------------------------------------------------------------------
# 10. refinement loop rewind budget
# ---------------------------------------------------------------------------

def test_refinement_rewind_budget_terminates(tmp_path):
    config = mockscripts.tiny_run_config()
    script = mockscripts.full_run_script(
        config,
        refinement_decisions=["REVISIT: running experiments"] * 3)
    runner = _autonomous_runner(tmp_path, "rewind", script, config)
    state = runner.run()
    assert state.status is RunStatus.COMPLETE
    assert state.rewinds_used == 2
    assert len([e for e in runner.events.snapshot()
                if e.kind == "rewound"]) == 2
    print(PASS.format("refinement loop stopped by rewind budget (2),"
                      " run Complete"))
