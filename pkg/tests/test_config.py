import json

import pytest

from researchflow.core import Config, PhaseId, config_from_dict, load_config
from researchflow.errors import ConfigError


def test_defaults_match_hyperparameter_table():
    cfg = Config()
    assert cfg.lit_review_paper_target == 5
    assert cfg.full_text_decay_steps == 3
    assert cfg.agent_temperature == 0.8
    assert cfg.dataprep_timeout == 120.0
    assert cfg.solver_steps == 3
    assert cfg.repair_attempts == 2
    assert cfg.max_top_codes == 2
    assert cfg.error_history_len == 5
    assert cfg.code_history_len == 2
    assert cfg.comparison_trials == 2
    assert cfg.experiment_timeout == 600.0
    assert cfg.score_temperature == 0.6
    assert cfg.repair_temperature == 0.8
    assert cfg.initial_code_temperature == 1.0
    assert cfg.solver_temperature == 1.0
    assert cfg.papersolver_steps == 5
    assert cfg.max_top_papers == 1
    assert cfg.paper_history_len == 10
    assert cfg.writing_reviewers == 1
    assert cfg.refinement_reviewers == 3
    assert cfg.initial_paper_temperature == 0.8
    assert cfg.completion_nudge_fraction == 0.7


def test_default_step_budgets():
    cfg = Config()
    assert cfg.max_steps[PhaseId.LITERATURE_REVIEW] == 100
    for phase in (PhaseId.PLAN_FORMULATION, PhaseId.DATA_PREPARATION,
                  PhaseId.RESULTS_INTERPRETATION):
        assert cfg.max_steps[phase] == 25


def test_unknown_key_is_an_error(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"solver_stepz": 3}))
    with pytest.raises(ConfigError, match="solver_stepz"):
        load_config(path)


def test_override_and_per_phase_steps(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({
        "solver_steps": 1,
        "max_steps_literature_review": 10,
    }))
    cfg = load_config(path)
    assert cfg.solver_steps == 1
    assert cfg.max_steps[PhaseId.LITERATURE_REVIEW] == 10
    assert cfg.max_steps[PhaseId.PLAN_FORMULATION] == 25


@pytest.mark.parametrize("field,value", [
    ("lit_review_paper_target", 0),
    ("repair_attempts", 0),
    ("agent_temperature", 2.5),
    ("score_temperature", -0.1),
    ("completion_nudge_fraction", 0.0),
    ("completion_nudge_fraction", 1.5),
])
def test_invariants_rejected(field, value):
    with pytest.raises(ConfigError):
        config_from_dict({field: value})


def test_flat_dict_roundtrip():
    cfg = config_from_dict({"solver_steps": 2, "max_steps_report_writing": 7})
    again = config_from_dict(cfg.to_flat_dict())
    assert again == cfg
