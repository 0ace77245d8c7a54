"""The fenced-command grammar.

Agents act exclusively by emitting a triple-backtick fence whose first token
names the command; everything else in the fence is the body. Parsing returns
the first well-formed command and ignores any later fences.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable

from ..errors import MalformedEditError, NoCommandError


class CommandKind(enum.Enum):
    SUMMARY = "SUMMARY"
    FULL_TEXT = "FULL_TEXT"
    ADD_PAPER = "ADD_PAPER"
    DIALOGUE = "DIALOGUE"
    PLAN = "PLAN"
    SUBMIT_CODE = "SUBMIT_CODE"
    SEARCH_HF = "SEARCH_HF"
    EXECUTE_CODE = "python"
    INTERPRETATION = "INTERPRETATION"
    EDIT = "EDIT"
    REPLACE = "REPLACE"
    SCORE = "SCORE"

    @property
    def keyword(self) -> str:
        return self.value


# Keywords are matched case-sensitively, exactly as the command prompts
# spell them (the code-execution keyword is lowercase).
_KEYWORDS = {kind.value: kind for kind in CommandKind}

FENCE = "```"


@dataclass(frozen=True)
class Command:
    kind: CommandKind
    body: str
    edit_from: int | None = None
    edit_to: int | None = None

    def __post_init__(self):
        if self.kind is CommandKind.EDIT:
            if self.edit_from is None or self.edit_to is None:
                raise ValueError("EDIT command requires two line indices")
        elif self.edit_from is not None or self.edit_to is not None:
            raise ValueError("only EDIT commands carry line indices")


def parse_command(response_text: str,
                  allowed: Iterable[CommandKind] | None = None) -> Command:
    """Extract the first well-formed fenced command from model output.

    ``allowed`` restricts which keywords count as commands in the calling
    context; a fence whose keyword is not allowed (for example an ordinary
    ```python code block in a phase where code execution is not a command)
    is inert text and scanning continues past it. A fence that is opened
    but never closed yields no command.

    Raises NoCommandError if no well-formed fence exists, and
    MalformedEditError if the first candidate EDIT fence does not carry two
    integer line indices.
    """
    allowed_set = set(allowed) if allowed is not None else set(CommandKind)
    lines = response_text.split("\n")
    i = 0
    while i < len(lines):
        stripped = lines[i].lstrip()
        if not stripped.startswith(FENCE):
            i += 1
            continue
        keyword_line = stripped[len(FENCE):].strip()
        body_start = i + 1
        if not keyword_line:
            # keyword sits on the line after the opening ticks
            if body_start >= len(lines):
                break
            if lines[body_start].lstrip().startswith(FENCE):
                # empty fence; the next marker closes it
                i = body_start + 1
                continue
            keyword_line = lines[body_start].strip()
            body_start += 1
        close = _find_close(lines, body_start)
        if close is None:
            # unclosed fence: nothing after it can open a new one
            break
        command = _match(keyword_line, lines[body_start:close], allowed_set)
        if command is not None:
            return command
        i = close + 1
    raise NoCommandError("no well-formed fenced command in response")


def _find_close(lines: list[str], start: int) -> int | None:
    for j in range(start, len(lines)):
        if lines[j].lstrip().startswith(FENCE):
            return j
    return None


def _match(keyword_line: str, body_lines: list[str],
           allowed: set[CommandKind]) -> Command | None:
    tokens = keyword_line.split()
    if not tokens:
        return None
    kind = _KEYWORDS.get(tokens[0])
    if kind is None or kind not in allowed:
        return None
    body = "\n".join(body_lines)
    if kind is CommandKind.EDIT:
        ints = []
        for tok in tokens[1:3]:
            try:
                ints.append(int(tok))
            except ValueError:
                break
        if len(ints) != 2:
            raise MalformedEditError(
                f"EDIT keyword line needs two integers: {keyword_line!r}")
        return Command(kind, body, edit_from=ints[0], edit_to=ints[1])
    return Command(kind, body)


def serialize_command(command: Command) -> str:
    """Render a command back to its fenced text form.

    Inverse of :func:`parse_command` for bodies that do not themselves
    contain fence-marker lines (the grammar excludes nested fences).
    """
    for line in command.body.split("\n"):
        if line.lstrip().startswith(FENCE):
            raise ValueError("command body may not contain fence markers")
    if command.kind is CommandKind.EDIT:
        keyword = f"EDIT {command.edit_from} {command.edit_to}"
    else:
        keyword = command.kind.keyword
    return f"{FENCE}{keyword}\n{command.body}\n{FENCE}"
