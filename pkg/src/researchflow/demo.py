"""Deterministic demo runs: canned gateway scripts plus tool fixtures.

Scripted runs are a first-class way to exercise the whole pipeline offline
(CI, demos, the browser console). ``write_demo`` materializes everything a
``researchflow run --mock-script ...`` invocation needs.
"""

from __future__ import annotations

import json
from pathlib import Path

from .core import Config
from .tools import FixtureArxivClient, PaperSummary

SECTION_QUERY = "related literature"
INTRO_BODY_LINE = 9  # introduction placeholder index in SCAFFOLD_SOURCE

SECTION_TITLES = ["Abstract", "Introduction", "Background", "Related Work",
                  "Methods", "Experimental Setup", "Results", "Discussion"]

EXPERIMENT_CODE = "print('experiment accuracy: 0.91')"
DATASET_CODE = "data = list(range(100))\nprint('rows:', len(data))"

SCAFFOLD_SOURCE = """\\documentclass{article}
\\title{Research Report: Word Order Sensitivity}
\\author{Agent Laboratory}
\\begin{document}
\\maketitle
\\begin{abstract}
(ABSTRACT HERE)
\\end{abstract}
\\section{Introduction}
(INTRODUCTION HERE)
\\section{Background}
(BACKGROUND HERE)
\\section{Related Work}
(RELATED WORK HERE)
\\section{Methods}
(METHODS HERE)
\\section{Experimental Setup}
(EXPERIMENTAL SETUP HERE)
\\section{Results}
(RESULTS HERE)
\\section{Discussion}
(DISCUSSION HERE)
\\end{document}"""

_REVIEW_TEMPLATE = {
    "Summary": "A small, clearly scoped empirical study.",
    "Strengths": ["Simple and reproducible setup.",
                  "Clear reporting of the headline metric."],
    "Weaknesses": ["Single dataset.", "No ablations."],
    "Originality": 2, "Quality": 3, "Clarity": 3, "Significance": 2,
    "Questions": ["Does the effect persist on larger datasets?"],
    "Limitations": ["Scope is intentionally narrow."],
    "Ethical Concerns": False,
    "Soundness": 3, "Presentation": 3, "Contribution": 2,
    "Overall": 5, "Confidence": 4, "Decision": "Reject",
}


def fence(keyword: str, body: str) -> str:
    return f"```{keyword}\n{body}\n```"


def review_response(overall: int = 5) -> str:
    data = dict(_REVIEW_TEMPLATE)
    data["Overall"] = overall
    data["Decision"] = "Accept" if overall >= 6 else "Reject"
    return ("THOUGHT:\nA focused empirical study.\n\nREVIEW JSON:\n"
            + fence("json", json.dumps(data)))


def lit_review_block(config: Config) -> list[str]:
    return [fence("ADD_PAPER", f"2308.1148{i}\nSummary of related work {i}.")
            for i in range(config.lit_review_paper_target)]


def plan_block() -> list[str]:
    return [
        fence("DIALOGUE", "how about a tiny logistic regression study?"),
        fence("DIALOGUE", "agreed, keep the data small"),
        fence("PLAN", "train logistic regression on a small dataset and"
                      " report accuracy"),
    ]


def dataprep_block() -> list[str]:
    return [
        fence("python", "print('preparing rows:', 100)"),
        fence("SUBMIT_CODE", DATASET_CODE),
    ]


def experiments_block(config: Config, scores=None) -> list[str]:
    responses = []
    total = config.solver_steps * config.comparison_trials
    scores = scores or [0.5 + 0.4 * (i + 1) / total for i in range(total)]
    for score in scores:
        responses.append(fence("REPLACE", EXPERIMENT_CODE))
        responses.append(fence("SCORE", f"{min(score, 1.0):.2f}"))
        responses.append("reflection: the accuracy could still improve")
    return responses


def interpretation_block() -> list[str]:
    return [
        fence("DIALOGUE", "what stands out in the results?"),
        fence("DIALOGUE", "accuracy 0.91 beats the naive baseline"),
        fence("INTERPRETATION", "the experiment reached 0.91 accuracy,"
                                " a 12 point gain over the baseline"),
    ]


def report_block(config: Config, initial_overall: int = 5,
                 edit_overalls=None) -> list[str]:
    responses = [fence("REPLACE", SCAFFOLD_SOURCE)]
    for title in SECTION_TITLES:
        responses.append(SECTION_QUERY)
        responses.append(fence(
            "REPLACE", f"Plain prose body for the {title} section."))
    for _ in range(config.writing_reviewers):
        responses.append(review_response(initial_overall))
    edit_overalls = edit_overalls if edit_overalls is not None else [
        min(10, initial_overall + 2)] * config.papersolver_steps
    for overall in edit_overalls:
        responses.append(fence(f"EDIT {INTRO_BODY_LINE} {INTRO_BODY_LINE}",
                               f"Revised introduction aiming for {overall}."))
        for _ in range(config.writing_reviewers):
            responses.append(review_response(overall))
    return responses


def refinement_block(config: Config, decision: str = "FINALIZE",
                     overall: int = 7) -> list[str]:
    responses = [review_response(overall)
                 for _ in range(config.refinement_reviewers)]
    responses.append(decision)
    return responses


def full_run_script(config: Config, refinement_decisions=None) -> list[str]:
    """A complete autonomous run; extra refinement decisions append full
    rewound rounds (experiments onward) before each next decision."""
    decisions = refinement_decisions or ["FINALIZE"]
    responses = (lit_review_block(config) + plan_block() + dataprep_block()
                 + experiments_block(config) + interpretation_block()
                 + report_block(config))
    responses += refinement_block(config, decisions[0])
    for decision in decisions[1:]:
        responses += (experiments_block(config) + interpretation_block()
                      + report_block(config))
        responses += refinement_block(config, decision)
    return responses


def record_tool_fixtures(fixtures_dir) -> FixtureArxivClient:
    """Arxiv fixtures every scripted run needs (the section search query)."""
    client = FixtureArxivClient(fixtures_dir)
    client.record_search(SECTION_QUERY, [
        PaperSummary("2308.11483", "Word Order Sensitivity",
                     "Order effects in multiple choice benchmarks."),
    ])
    return client


def tiny_run_config(**overrides) -> Config:
    defaults = dict(
        lit_review_paper_target=2,
        solver_steps=1,
        comparison_trials=1,
        papersolver_steps=1,
        writing_reviewers=1,
        refinement_reviewers=3,
        experiment_timeout=30.0,
        dataprep_timeout=30.0,
    )
    defaults.update(overrides)
    return Config(**defaults)


def console_walkthrough_script(config: Config) -> list[str]:
    """A co-pilot choreography script: expects exactly one retry at the
    plan-formulation gate (the plan block appears twice, in sequence)."""
    return (lit_review_block(config) + plan_block() + plan_block()
            + dataprep_block() + experiments_block(config)
            + interpretation_block() + report_block(config)
            + refinement_block(config))


def write_demo(target_dir: str | Path, config: Config | None = None,
               console_walkthrough: bool = False) -> dict:
    """Materialize a runnable demo: mock script, tool fixtures, config.

    Returns the paths plus a ready-to-paste CLI invocation. With
    ``console_walkthrough`` the script instead expects one retry at the
    plan-formulation gate (for driving the co-pilot console).
    """
    target = Path(target_dir)
    target.mkdir(parents=True, exist_ok=True)
    config = config or tiny_run_config()
    script = (console_walkthrough_script(config) if console_walkthrough
              else full_run_script(config))
    script_path = target / "mock_script.json"
    script_path.write_text(json.dumps({"responses": script}, indent=2))
    fixtures_dir = target / "tool-fixtures"
    record_tool_fixtures(fixtures_dir)
    config_path = target / "config.json"
    config_path.write_text(json.dumps(config.to_flat_dict(), indent=2))
    command = (f"researchflow run --topic 'word order sensitivity'"
               f" --config {config_path} --mock-script {script_path}"
               f" --tool-fixtures {fixtures_dir}"
               f" --runs-dir {target / 'runs'}")
    return {"script": str(script_path), "fixtures": str(fixtures_dir),
            "config": str(config_path), "command": command}
