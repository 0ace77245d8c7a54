"""Report generation: scaffold, per-section writing, compile-gated edits,
and rubric-based automated review.

The document is a line-addressed LaTeX source with exactly eight sections in
a fixed order. Every committed state must pass the compile check and the
structure check (each section header exactly once, in order); candidate
edits that break either are discarded, leaving the document unchanged.
"""

from __future__ import annotations

import enum
import json
import logging
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

from . import prompts
from .core import Command, CommandKind, Config, parse_command
from .errors import (CompileRejectedError, MalformedEditError, NoCommandError,
                     RangeError, ReportFailedError, ScaffoldFailedError,
                     SectionFailedError, StructureError)
from .gateway import ChatRequest, Gateway
from .mle_solver import apply_edit, numbered_lines
from .tools import ArxivClient, PaperSummary, compile_latex, format_summaries
from .tools.arxiv import SEARCH_RETRY_CAP

logger = logging.getLogger(__name__)

SCAFFOLD_RETRIES = 3
SECTION_RETRIES = 3


class Section(enum.Enum):
    ABSTRACT = "Abstract"
    INTRODUCTION = "Introduction"
    BACKGROUND = "Background"
    RELATED_WORK = "Related Work"
    METHODS = "Methods"
    EXPERIMENTAL_SETUP = "Experimental Setup"
    RESULTS = "Results"
    DISCUSSION = "Discussion"

    @property
    def title(self) -> str:
        return self.value

    @property
    def placeholder(self) -> str:
        return f"({self.value.upper()} HERE)"


SECTION_ORDER = tuple(Section)

_SECTION_RE = re.compile(r"\\section\*?\{([^}]*)\}")


def _header_section(line: str) -> Section | None:
    """Canonical section headed on this line; StructureError on a \\section
    command with a non-canonical title (stray sections are never legal,
    though \\subsection is fine)."""
    if "\\begin{abstract}" in line:
        return Section.ABSTRACT
    match = _SECTION_RE.search(line)
    if match is None:
        return None
    title = " ".join(match.group(1).split()).lower()
    for section in SECTION_ORDER:
        if title == section.title.lower():
            return section
    raise StructureError(f"unexpected section command: {match.group(0)}")


def index_sections(lines: list[str]) -> dict[Section, tuple[int, int]]:
    """Map each of the eight sections to its inclusive line range.

    Raises StructureError unless every section appears exactly once and in
    the canonical order.
    """
    headers: list[tuple[Section, int]] = []
    for i, line in enumerate(lines):
        section = _header_section(line)
        if section is not None:
            headers.append((section, i))
    seen = [s for s, _ in headers]
    for section in SECTION_ORDER:
        count = seen.count(section)
        if count != 1:
            raise StructureError(
                f"section {section.title!r} appears {count} times, expected 1")
    if seen != list(SECTION_ORDER):
        raise StructureError(
            "sections out of order: " + ", ".join(s.title for s in seen))
    end_of_doc = len(lines) - 1
    for i, line in enumerate(lines):
        if "\\end{document}" in line:
            end_of_doc = i - 1
            break
    ranges: dict[Section, tuple[int, int]] = {}
    for idx, (section, start) in enumerate(headers):
        end = headers[idx + 1][1] - 1 if idx + 1 < len(headers) else end_of_doc
        ranges[section] = (start, end)
    return ranges


@dataclass(frozen=True)
class PaperDoc:
    lines: tuple[str, ...]
    sections: dict[Section, tuple[int, int]]
    score: float | None = None

    @classmethod
    def from_source(cls, source: str, score: float | None = None) -> "PaperDoc":
        lines = tuple(source.split("\n"))
        return cls(lines=lines, sections=index_sections(list(lines)),
                   score=score)

    @property
    def source(self) -> str:
        return "\n".join(self.lines)


# ---------------------------------------------------------------------------
# Reviews
# ---------------------------------------------------------------------------

_RATING_RANGES = {
    "Originality": (1, 4), "Quality": (1, 4), "Clarity": (1, 4),
    "Significance": (1, 4), "Soundness": (1, 4), "Presentation": (1, 4),
    "Contribution": (1, 4), "Overall": (1, 10), "Confidence": (1, 5),
}


@dataclass(frozen=True)
class Review:
    summary: str
    strengths: tuple[str, ...]
    weaknesses: tuple[str, ...]
    questions: tuple[str, ...]
    limitations: tuple[str, ...]
    originality: int
    quality: int
    clarity: int
    significance: int
    soundness: int
    presentation: int
    contribution: int
    overall: int
    confidence: int
    ethical_concerns: bool
    decision: str
    raw: str = field(default="", compare=False)


def _extract_json(text: str) -> dict:
    fence = re.search(r"```json\s*\n(.*?)\n\s*```", text, re.DOTALL)
    candidates = []
    if fence:
        candidates.append(fence.group(1))
    start = text.find("{")
    if start != -1:
        depth = 0
        in_string = False
        escape = False
        for i in range(start, len(text)):
            ch = text[i]
            if in_string:
                if escape:
                    escape = False
                elif ch == "\\":
                    escape = True
                elif ch == '"':
                    in_string = False
                continue
            if ch == '"':
                in_string = True
            elif ch == "{":
                depth += 1
            elif ch == "}":
                depth -= 1
                if depth == 0:
                    candidates.append(text[start:i + 1])
                    break
    for candidate in candidates:
        try:
            parsed = json.loads(candidate)
        except json.JSONDecodeError:
            continue
        if isinstance(parsed, dict):
            return parsed
    raise ValueError("no JSON object found in review response")


def _str_list(value) -> tuple[str, ...]:
    if value is None:
        return ()
    if isinstance(value, str):
        return (value,)
    if isinstance(value, list):
        return tuple(str(item) for item in value)
    raise ValueError(f"expected a list of strings, got {value!r}")


def parse_review(text: str) -> Review:
    """Parse and range-validate a reviewer response.

    The eleven rating/decision fields are mandatory and checked against
    their scales; the free-text fields default to empty when omitted.
    Raises ValueError for anything invalid (the caller re-asks).
    """
    data = _extract_json(text)
    ratings = {}
    for name, (low, high) in _RATING_RANGES.items():
        if name not in data:
            raise ValueError(f"review is missing {name!r}")
        value = data[name]
        if isinstance(value, bool) or not isinstance(value, int):
            raise ValueError(f"{name} must be an integer, got {value!r}")
        if not low <= value <= high:
            raise ValueError(f"{name}={value} outside [{low}, {high}]")
        ratings[name] = value
    decision = data.get("Decision")
    if decision not in ("Accept", "Reject"):
        raise ValueError(f"decision must be Accept or Reject, got {decision!r}")
    ethical = data.get("Ethical Concerns")
    if not isinstance(ethical, bool):
        raise ValueError(f"Ethical Concerns must be a boolean, got {ethical!r}")
    return Review(
        summary=str(data.get("Summary", "")),
        strengths=_str_list(data.get("Strengths")),
        weaknesses=_str_list(data.get("Weaknesses")),
        questions=_str_list(data.get("Questions")),
        limitations=_str_list(data.get("Limitations")),
        originality=ratings["Originality"],
        quality=ratings["Quality"],
        clarity=ratings["Clarity"],
        significance=ratings["Significance"],
        soundness=ratings["Soundness"],
        presentation=ratings["Presentation"],
        contribution=ratings["Contribution"],
        overall=ratings["Overall"],
        confidence=ratings["Confidence"],
        ethical_concerns=ethical,
        decision=decision,
        raw=text,
    )


def mean_overall(reviews: list[Review]) -> float:
    if not reviews:
        return 0.0
    return sum(r.overall for r in reviews) / len(reviews)


def reviews_to_text(reviews: list[Review]) -> str:
    blocks = []
    for i, review in enumerate(reviews, start=1):
        blocks.append(
            f"Reviewer {i}: Overall {review.overall}/10,"
            f" Decision: {review.decision}.\n"
            f"Summary: {review.summary}\n"
            f"Weaknesses: {'; '.join(review.weaknesses)}")
    return "\n\n".join(blocks)


# ---------------------------------------------------------------------------
# Report solver
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ReportContext:
    topic: str
    plan: str
    exp_code: str
    exp_results: str
    insights: str
    lit_review_str: str
    notes: str = ""


class ReportSolver:
    def __init__(self, config: Config, gateway: Gateway, arxiv: ArxivClient,
                 context: ReportContext,
                 artifacts_dir: str | Path | None = None):
        self.config = config
        self.gateway = gateway
        self.arxiv = arxiv
        self.context = context
        self.artifacts_dir = Path(artifacts_dir) if artifacts_dir else None
        self.score_trace: list[float] = []

    # -- gating ---------------------------------------------------------

    def gate(self, lines: tuple[str, ...]) -> str | None:
        """Structure plus compile check; returns the rejection reason or
        None when the document may be committed."""
        try:
            index_sections(list(lines))
        except StructureError as exc:
            return str(exc)
        result = compile_latex("\n".join(lines),
                               compiler=self.config.latex_compiler,
                               resource_dir=self.artifacts_dir)
        if not result.ok:
            return result.log
        return None

    # -- prompt plumbing --------------------------------------------------

    def _figures_note(self) -> str:
        if self.artifacts_dir is None or not self.artifacts_dir.is_dir():
            return ""
        figures = sorted(p.name for p in self.artifacts_dir.glob("*.png"))
        if not figures:
            return ""
        return ("The following figure files exist and may be included with"
                " \\includegraphics: " + ", ".join(figures))

    def _notes(self) -> str:
        note = self.context.notes
        figures = self._figures_note()
        return f"{note}\n{figures}".strip()

    def _system(self, ref_papers: str, paper_lines: str, cmd_set: str,
                section_cmd: str, paper_progress: str = "") -> str:
        return prompts.report_system_prompt(
            ref_papers=ref_papers,
            notes=self._notes(),
            lit_review_str=self.context.lit_review_str,
            plan=self.context.plan,
            exp_code=self.context.exp_code,
            exp_results=self.context.exp_results,
            insights=self.context.insights,
            paper_progress=paper_progress,
            cmd_set=cmd_set,
            paper_lines=paper_lines,
            section_cmd=section_cmd,
        )

    def _complete(self, system: str, user: str, temperature: float,
                  label: str) -> str:
        return self.gateway.complete(
            ChatRequest(model_id=self.config.model_id, system=system,
                        user=user, temperature=temperature,
                        max_output_tokens=self.config.max_output_tokens),
            label=label)

    @staticmethod
    def _extract_latex(response: str) -> str:
        """REPLACE-command body, else fenced block body, else raw text."""
        try:
            command = parse_command(response, allowed={CommandKind.REPLACE})
            return command.body
        except (NoCommandError, MalformedEditError):
            pass
        fence = re.search(r"```(?:latex)?\s*\n(.*?)\n\s*```", response,
                          re.DOTALL)
        if fence:
            return fence.group(1)
        return response

    # -- pipeline stages ---------------------------------------------------

    def build_scaffold(self) -> PaperDoc:
        """Generate the eight-section placeholder document; every attempt is
        compile- and structure-gated, with the title required to carry the
        'Research Report:' prefix."""
        cmd_set = "\n".join([prompts.REPLACE_PAPER_TOOL,
                             prompts.PAPER_COMMAND_DESCRIPTION])
        system = self._system(ref_papers="",
                              paper_lines="(the paper is currently empty)",
                              cmd_set=cmd_set,
                              section_cmd=prompts.SCAFFOLD_OBJECTIVE)
        user = ("Now please enter the ``` REPLACE command to create the"
                " scaffold:")
        last_problem = ""
        for _ in range(SCAFFOLD_RETRIES):
            response = self._complete(system, user,
                                      self.config.initial_paper_temperature,
                                      "paper:scaffold")
            source = self._extract_latex(response)
            problem = self._scaffold_problem(source)
            if problem is None:
                return PaperDoc.from_source(source)
            last_problem = problem
            logger.info("scaffold rejected: %s", problem)
        raise ScaffoldFailedError(f"scaffold rejected: {last_problem}")

    def _scaffold_problem(self, source: str) -> str | None:
        lines = tuple(source.split("\n"))
        problem = self.gate(lines)
        if problem is not None:
            return problem
        title = re.search(r"\\title\{([^}]*)\}", source)
        if title is None or not title.group(1).strip().startswith(
                "Research Report:"):
            return "title must start with 'Research Report:'"
        missing = [s.placeholder for s in SECTION_ORDER
                   if s.placeholder not in source]
        if missing:
            return f"missing placeholders: {', '.join(missing)}"
        return None

    def section_search(self, section: Section) -> list[PaperSummary]:
        """Ask for a query, search; at most five total attempts, and an
        empty result just means the section proceeds citation-free."""
        failed: list[str] = []
        for _ in range(SEARCH_RETRY_CAP):
            att_str = ""
            if failed:
                att_str = ("The following queries returned no results, try"
                           " something different: " + "; ".join(failed))
            try:
                query = self._complete(
                    prompts.section_search_system_prompt(section.title),
                    prompts.section_search_prompt(self.context.topic,
                                                  self.context.plan, att_str),
                    self.config.agent_temperature, "paper:search").strip()
                if not query:
                    continue
                results = self.arxiv.search(query, 20)
            except Exception as exc:
                logger.info("section search attempt failed: %s", exc)
                failed.append("(request failed)")
                continue
            if results:
                return results
            failed.append(query)
        return []

    def generate_section(self, doc: PaperDoc, section: Section,
                         related: list[PaperSummary]) -> PaperDoc:
        """Replace the section's placeholder line with generated body text;
        a candidate that breaks the compile or structure gate is discarded
        and regenerated."""
        placeholder_at = None
        for i, line in enumerate(doc.lines):
            if section.placeholder in line:
                placeholder_at = i
                break
        if placeholder_at is None:
            raise SectionFailedError(
                f"placeholder for {section.title} is gone")
        related_str = format_summaries(related) if related else "none"
        cmd_set = "\n".join([prompts.REPLACE_PAPER_TOOL,
                             prompts.PAPER_COMMAND_DESCRIPTION])
        err = ""
        for _ in range(SECTION_RETRIES):
            system = self._system(
                ref_papers=related_str,
                paper_lines=numbered_lines(doc.lines),
                cmd_set=cmd_set,
                section_cmd=prompts.section_objective(
                    section.title, prompts.SECTION_TIPS[section.title]),
            )
            user = prompts.section_generation_prompt(err, related_str)
            response = self._complete(system, user,
                                      self.config.solver_temperature,
                                      "paper:section")
            body = self._extract_latex(response)
            new_lines = tuple(apply_edit(list(doc.lines), placeholder_at,
                                         placeholder_at, body.split("\n")))
            problem = self.gate(new_lines)
            if problem is None:
                return PaperDoc.from_source("\n".join(new_lines),
                                            score=doc.score)
            err = prompts.error_history_entry(f"{section.title} body", problem)
            logger.info("section %s rejected: %s", section.title, problem)
        raise SectionFailedError(f"could not generate {section.title}")

    def edit_paper(self, doc: PaperDoc, command: Command) -> PaperDoc:
        """Apply an EDIT command; commit only if the result passes the gate,
        otherwise the document is unchanged and the edit is rejected."""
        if command.kind is not CommandKind.EDIT:
            raise ValueError("edit_paper needs an EDIT command")
        new_lines = tuple(apply_edit(list(doc.lines), command.edit_from,
                                     command.edit_to,
                                     command.body.split("\n")))
        problem = self.gate(new_lines)
        if problem is not None:
            raise CompileRejectedError(problem)
        return PaperDoc.from_source("\n".join(new_lines), score=doc.score)

    def review_paper(self, doc: PaperDoc, reviewer_count: int) -> list[Review]:
        """Collect range-validated reviews; a reviewer whose responses never
        validate is dropped from the aggregate rather than failing the run."""
        reviews: list[Review] = []
        for reviewer in range(reviewer_count):
            review = None
            for _ in range(1 + self.config.comparison_trials):
                response = self._complete(
                    prompts.REVIEWER_SYSTEM_PROMPT + "\n" + prompts.REVIEWER_FORM,
                    prompts.reviewer_prompt(self.context.plan, doc.source),
                    self.config.score_temperature, "paper:review")
                try:
                    review = parse_review(response)
                    break
                except ValueError as exc:
                    logger.info("review rejected: %s", exc)
            if review is None:
                logger.warning("reviewer %d unavailable, excluded from"
                               " aggregate", reviewer + 1)
                continue
            reviews.append(review)
        return reviews

    def solve_paper(self) -> tuple[PaperDoc, list[Review]]:
        """Scaffold, write all eight sections, then run compile-gated edit
        iterations scored by review; the best-scoring document is kept."""
        doc = self.build_scaffold()
        for section in SECTION_ORDER:
            related = self.section_search(section)
            doc = self.generate_section(doc, section, related)
        reviews = self.review_paper(doc, self.config.writing_reviewers)
        best = replace(doc, score=mean_overall(reviews))
        best_reviews = reviews
        self.score_trace.append(best.score)
        edit_cmd_set = "\n".join([prompts.EDIT_PAPER_TOOL,
                                  prompts.REPLACE_PAPER_TOOL,
                                  prompts.PAPER_COMMAND_DESCRIPTION])
        feedback = ""
        for _ in range(self.config.papersolver_steps):
            system = self._system(
                ref_papers="",
                paper_lines=numbered_lines(best.lines),
                cmd_set=edit_cmd_set,
                section_cmd="",
                paper_progress=(f"The current paper review score is"
                                f" {best.score:g}/10."),
            )
            user = (f"{feedback}\n"
                    "Please produce a single command below to improve the"
                    " paper:")
            response = self._complete(system, user,
                                      self.config.solver_temperature,
                                      "paper:edit")
            feedback = ""
            try:
                command = parse_command(
                    response, allowed={CommandKind.EDIT, CommandKind.REPLACE})
            except (NoCommandError, MalformedEditError) as exc:
                feedback = prompts.error_history_entry(response[:100], str(exc))
                self.score_trace.append(best.score)
                continue
            try:
                if command.kind is CommandKind.EDIT:
                    candidate = self.edit_paper(best, command)
                else:
                    source = command.body
                    problem = self.gate(tuple(source.split("\n")))
                    if problem is not None:
                        raise CompileRejectedError(problem)
                    candidate = PaperDoc.from_source(source, score=best.score)
            except (CompileRejectedError, RangeError) as exc:
                feedback = prompts.error_history_entry(
                    self._describe(command), str(exc))
                self.score_trace.append(best.score)
                continue
            reviews = self.review_paper(candidate,
                                        self.config.writing_reviewers)
            score = mean_overall(reviews)
            if score > best.score:
                best = replace(candidate, score=score)
                best_reviews = reviews
            self.score_trace.append(best.score)
        if self.gate(best.lines) is not None:
            raise ReportFailedError("no compiling document at the end of"
                                    " report writing")
        return best, best_reviews

    @staticmethod
    def _describe(command: Command) -> str:
        if command.kind is CommandKind.EDIT:
            return f"EDIT {command.edit_from} {command.edit_to}"
        return command.kind.keyword
