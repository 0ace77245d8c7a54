"""Test-facing aliases for the package's demo script builders."""

from researchflow.demo import (DATASET_CODE, EXPERIMENT_CODE,
                               INTRO_BODY_LINE, SECTION_QUERY, SECTION_TITLES,
                               dataprep_block, experiments_block,
                               full_run_script, interpretation_block,
                               lit_review_block, plan_block,
                               record_tool_fixtures, refinement_block,
                               report_block, tiny_run_config)

__all__ = [
    "DATASET_CODE",
    "EXPERIMENT_CODE",
    "INTRO_BODY_LINE",
    "SECTION_QUERY",
    "SECTION_TITLES",
    "dataprep_block",
    "experiments_block",
    "full_run_script",
    "interpretation_block",
    "lit_review_block",
    "plan_block",
    "record_tool_fixtures",
    "refinement_block",
    "report_block",
    "tiny_run_config",
]
