import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from researchflow.errors import (ExperimentsFailedError, RangeError,
                                 RepairExhaustedError)
from researchflow.mle_solver import (CandidatePool, ExperimentSolver,
                                     HeldOutMetric, LLMReward,
                                     ProgramCandidate, SolverContext,
                                     accuracy_metric, apply_edit, parse_score,
                                     split_train_dev)
from researchflow.tools import Sandbox

from .helpers import fence, make_gateway, small_config


# ---------------------------------------------------------------------------
# apply_edit
# ---------------------------------------------------------------------------

def test_apply_edit_inclusive_range():
    assert apply_edit(["a", "b", "c", "d"], 1, 2, ["x"]) == ["a", "x", "d"]


def test_apply_edit_full_replacement():
    assert apply_edit(["x"], 0, 0, ["p", "q"]) == ["p", "q"]


def test_apply_edit_inverted_range():
    with pytest.raises(RangeError):
        apply_edit(["a", "b"], 1, 0, ["x"])


def test_apply_edit_out_of_bounds():
    with pytest.raises(RangeError):
        apply_edit(["a", "b"], 0, 2, ["x"])
    with pytest.raises(RangeError):
        apply_edit(["a"], -1, 0, ["x"])


def _naive_splice(lines, n, m, new_lines):
    out = []
    for i, line in enumerate(lines):
        if i == n:
            out.extend(new_lines)
        if n <= i <= m:
            continue
        out.append(line)
    return out


@settings(max_examples=300, deadline=None)
@given(st.lists(st.text(max_size=5), min_size=1, max_size=30),
       st.data())
def test_apply_edit_matches_naive_oracle(lines, data):
    n = data.draw(st.integers(0, len(lines) - 1))
    m = data.draw(st.integers(n, len(lines) - 1))
    new_lines = data.draw(st.lists(st.text(max_size=5), max_size=10))
    result = apply_edit(lines, n, m, new_lines)
    assert result == _naive_splice(lines, n, m, new_lines)
    assert len(result) == len(lines) - (m - n + 1) + len(new_lines)


# ---------------------------------------------------------------------------
# pool semantics
# ---------------------------------------------------------------------------

def _cand(score, tag="c"):
    return ProgramCandidate(lines=(f"# {tag}",), score=score,
                            output="", compiled=True)


def test_pool_replace_lowest():
    pool = CandidatePool(2)
    pool.offer(_cand(0.9))
    pool.offer(_cand(0.5))
    assert pool.offer(_cand(0.7))
    assert [c.score for c in pool.entries] == [0.9, 0.7]


def test_pool_rejects_worse():
    pool = CandidatePool(2)
    pool.offer(_cand(0.9))
    pool.offer(_cand(0.5))
    assert not pool.offer(_cand(0.4))
    assert [c.score for c in pool.entries] == [0.9, 0.5]


def test_pool_tie_keeps_incumbent():
    pool = CandidatePool(1)
    incumbent = _cand(0.5, "old")
    pool.offer(incumbent)
    assert not pool.offer(_cand(0.5, "new"))
    assert pool.entries[0] is incumbent


def test_pool_accepts_into_empty():
    pool = CandidatePool(2)
    assert pool.offer(_cand(0.3))
    assert pool.max_score() == 0.3


def test_compiled_zero_score_is_pool_eligible():
    pool = CandidatePool(2)
    assert pool.offer(_cand(0.0))
    assert len(pool) == 1


def test_scored_candidate_must_have_compiled():
    with pytest.raises(ValueError):
        ProgramCandidate(lines=("x",), score=0.5, compiled=False)
    with pytest.raises(ValueError):
        ProgramCandidate(lines=("x",), score=1.5, compiled=True)


def test_pool_uniform_sampling():
    pool = CandidatePool(2)
    a, b = _cand(0.9, "a"), _cand(0.5, "b")
    pool.offer(a)
    pool.offer(b)
    rng = random.Random(7)
    seen = {pool.sample(rng).lines for _ in range(64)}
    assert seen == {a.lines, b.lines}


# ---------------------------------------------------------------------------
# score parsing
# ---------------------------------------------------------------------------

def test_parse_score_accepts_decimal():
    assert parse_score("```SCORE\n0.75\n```") == 0.75


@pytest.mark.parametrize("bad", [
    "```SCORE\n1.2\n```", "```SCORE\n-0.1\n```", "```SCORE\nabc\n```",
    "```SCORE\nnan\n```", "no fence here",
])
def test_parse_score_rejects(bad):
    assert parse_score(bad) is None


def test_score_reask_then_accept():
    solver = _solver(
        responses=[fence("SCORE", "1.2"), fence("SCORE", "0.9")],
        mode=LLMReward(plan="p"))
    assert solver.score_candidate("code", "out") == 0.9


def test_score_exhausted_is_zero():
    cfg = small_config(comparison_trials=2)
    solver = _solver(responses=[fence("SCORE", "oops")] * 3,
                     mode=LLMReward(plan="p"), config=cfg)
    assert solver.score_candidate("code", "out") == 0.0


# ---------------------------------------------------------------------------
# solver pipeline
# ---------------------------------------------------------------------------

def _solver(responses, mode=None, config=None, seed=0, sandbox=None):
    return ExperimentSolver(
        config=config or small_config(),
        gateway=make_gateway(responses),
        sandbox=sandbox or Sandbox(),
        context=SolverContext(plan="test plan", insights="", notes="",
                              dataset_code=""),
        mode=mode or LLMReward(plan="test plan"),
        rng=random.Random(seed),
    )


def test_bootstrap_must_replace():
    solver = _solver(responses=[fence("EDIT 0 0", "x = 1"),
                                fence("REPLACE", "print('hi')")])
    command = solver.propose(None, bootstrap=True)
    assert command.kind.name == "REPLACE"


def test_propose_gives_up_after_bounded_reasks():
    cfg = small_config(comparison_trials=1)
    solver = _solver(responses=["nothing", "still nothing"], config=cfg)
    assert solver.propose(None, bootstrap=True) is None


def test_execute_candidate_prepends_dataset_code():
    solver = _solver(responses=[])
    solver.context = solver.context.__class__(
        plan="p", insights="", notes="", dataset_code="data = list(range(7))")
    result, _ = solver.execute_candidate(("print(len(data))",))
    assert result.stdout.strip() == "7"
    assert result.error is None


def test_repair_succeeds_first_try():
    responses = [fence("python", "print('fixed')")]
    solver = _solver(responses=responses)
    lines, result, _ = solver.repair(("print(broken",), "SyntaxError")
    assert result.error is None
    assert solver.repair_calls_last_candidate == 1


def test_repair_exhausted_after_exactly_two():
    responses = [fence("python", "raise ValueError('still bad')")] * 2
    solver = _solver(responses=responses)
    with pytest.raises(RepairExhaustedError):
        solver.repair(("raise ValueError('bad')",), "ValueError: bad")
    assert solver.repair_calls_last_candidate == 2


def test_timeout_produces_synthetic_error_text():
    solver = _solver(responses=[])
    from researchflow.tools import ExecutionResult
    result = ExecutionResult(stdout="", error=None, duration=2.0,
                             timed_out=True)
    text = solver._error_text(result, 2.0)
    assert "timed out" in text


def test_reflection_failure_is_non_fatal():
    solver = _solver(responses=[])  # empty script: reflect call will fail
    reflection = solver.reflect("code", "some error")
    assert reflection == ""


def _happy_candidate_script(code, score):
    return [fence("REPLACE", code), fence("SCORE", str(score)), "reflection"]


def test_step_batch_offers_best_to_pool():
    cfg = small_config(solver_steps=1, comparison_trials=1)
    solver = _solver(responses=_happy_candidate_script("print('a')", 0.3),
                     config=cfg)
    solver.step_batch()
    assert solver.state.pool.max_score() == 0.3


def test_solve_keeps_pool_max_nondecreasing():
    cfg = small_config(solver_steps=3, comparison_trials=1)
    script = (_happy_candidate_script("print('a')", 0.2)
              + _happy_candidate_script("print('b')", 0.5)
              + _happy_candidate_script("print('c')", 0.4))
    solver = _solver(responses=script, config=cfg)
    result = solver.solve()
    assert result.best.score == 0.5
    assert result.pool_max_trace == [0.2, 0.5, 0.5]


def test_solve_fails_when_nothing_compiles():
    cfg = small_config(solver_steps=1, comparison_trials=1,
                       repair_attempts=2)
    script = [fence("REPLACE", "raise ValueError('no')"),
              fence("python", "raise ValueError('no')"),
              fence("python", "raise ValueError('no')"),
              "error reflection"]
    solver = _solver(responses=script, config=cfg)
    with pytest.raises(ExperimentsFailedError):
        solver.solve()


def test_solve_is_deterministic():
    cfg = small_config(solver_steps=2, comparison_trials=1)
    script = (_happy_candidate_script("print('a')", 0.2)
              + _happy_candidate_script("print('b')", 0.6))
    result_a = _solver(responses=script, config=cfg, seed=5).solve()
    result_b = _solver(responses=script, config=cfg, seed=5).solve()
    assert result_a.trace_hash() == result_b.trace_hash()


# ---------------------------------------------------------------------------
# held-out scoring mode
# ---------------------------------------------------------------------------

def test_split_is_exactly_80_20():
    inputs = np.arange(1000)
    labels = np.arange(1000) % 2
    tr_x, tr_y, dev_x, dev_y = split_train_dev(inputs, labels, seed=13)
    assert len(tr_x) == 800 and len(dev_x) == 200
    assert len(tr_y) == 800 and len(dev_y) == 200
    assert sorted(np.concatenate([tr_x, dev_x]).tolist()) == list(range(1000))


def test_split_is_seeded():
    inputs = np.arange(100)
    labels = np.arange(100)
    a = split_train_dev(inputs, labels, seed=3)
    b = split_train_dev(inputs, labels, seed=3)
    c = split_train_dev(inputs, labels, seed=4)
    assert a[2].tolist() == b[2].tolist()
    assert a[2].tolist() != c[2].tolist()


def test_perfect_predictor_scores_one():
    labels = np.arange(50) % 3
    mode = HeldOutMetric(dev_inputs=np.arange(50), dev_labels=labels,
                         metric=accuracy_metric)
    dataset_code = f"dev_labels = {labels.tolist()}"
    solver = _solver(responses=[], mode=mode)
    solver.context = solver.context.__class__(
        plan="p", insights="", notes="", dataset_code=dataset_code)
    result, predictions = solver.execute_candidate(
        ("dev_predictions = list(dev_labels)",))
    assert result.error is None
    assert solver.score_candidate("c", result.stdout, predictions) == 1.0


def test_missing_predictions_scores_zero():
    mode = HeldOutMetric(dev_inputs=np.arange(5), dev_labels=np.arange(5),
                         metric=accuracy_metric)
    solver = _solver(responses=[], mode=mode)
    assert solver.score_candidate("c", "", None) == 0.0


def test_accuracy_metric_range():
    assert accuracy_metric([1, 2, 3], [1, 2, 3]) == 1.0
    assert accuracy_metric([1, 2, 3], [0, 0, 0]) == 0.0
    assert accuracy_metric([1, 2], [1, 2, 3]) == 0.0
