"""Document compile checking.

``compile_latex`` gates every committed report state. When a real LaTeX
toolchain is installed it is used in a scratch directory; otherwise a builtin
structural checker stands in: complete-document markers, brace balance,
environment matching, preamble placement, math-mode parity, and graphics
targets. Its diagnostics play the compiler-log role (the error text is the
log tail).
"""

from __future__ import annotations

import re
import shutil
import subprocess
import tempfile
from dataclasses import dataclass
from pathlib import Path

from ..errors import CompilerMissingError

LOG_TAIL_CHARS = 2000


@dataclass(frozen=True)
class CompileResult:
    ok: bool
    log: str


def compile_latex(source: str, *, compiler: str = "auto",
                  resource_dir: str | Path | None = None,
                  timeout: float = 60.0) -> CompileResult:
    """Check that ``source`` is a compilable document.

    ``compiler`` is ``"auto"`` (first available of pdflatex, tectonic, then
    the builtin checker), ``"builtin"``, or an explicit executable name.
    Naming an executable that is not installed raises CompilerMissingError;
    document problems never raise, they come back as ``ok=False`` with the
    log tail.
    """
    command = _resolve_compiler(compiler)
    if command is None:
        return _builtin_check(source, resource_dir)
    return _run_external(command, source, resource_dir, timeout)


def _resolve_compiler(compiler: str) -> list[str] | None:
    if compiler == "builtin":
        return None
    if compiler == "auto":
        for name in ("pdflatex", "tectonic"):
            path = shutil.which(name)
            if path:
                return _command_for(name, path)
        return None
    path = shutil.which(compiler)
    if path is None:
        raise CompilerMissingError(f"document compiler not found: {compiler}")
    return _command_for(compiler, path)


def _command_for(name: str, path: str) -> list[str]:
    if "tectonic" in name:
        return [path, "main.tex"]
    return [path, "-interaction=nonstopmode", "-halt-on-error", "main.tex"]


def _run_external(command: list[str], source: str,
                  resource_dir: str | Path | None,
                  timeout: float) -> CompileResult:
    scratch = Path(tempfile.mkdtemp(prefix="rf-latex-"))
    try:
        (scratch / "main.tex").write_text(source)
        if resource_dir is not None:
            res = Path(resource_dir)
            if res.is_dir():
                for item in res.iterdir():
                    if item.is_file():
                        shutil.copy2(item, scratch / item.name)
        try:
            proc = subprocess.run(command, cwd=scratch,
                                  stdout=subprocess.PIPE,
                                  stderr=subprocess.STDOUT,
                                  text=True, timeout=timeout)
            output = proc.stdout or ""
            ok = proc.returncode == 0
        except subprocess.TimeoutExpired:
            output = "compile timed out"
            ok = False
        log_file = scratch / "main.log"
        if log_file.exists():
            output = log_file.read_text(errors="replace")
        return CompileResult(ok=ok, log=output[-LOG_TAIL_CHARS:])
    finally:
        shutil.rmtree(scratch, ignore_errors=True)


# ---------------------------------------------------------------------------
# Builtin structural checker
# ---------------------------------------------------------------------------

_BEGIN_RE = re.compile(r"\\begin\{([^}]*)\}")
_END_RE = re.compile(r"\\end\{([^}]*)\}")
_GRAPHICS_RE = re.compile(r"\\includegraphics(?:\[[^\]]*\])?\{([^}]*)\}")


def _strip_comments(line: str) -> str:
    out = []
    i = 0
    while i < len(line):
        ch = line[i]
        if ch == "\\" and i + 1 < len(line):
            out.append(line[i:i + 2])
            i += 2
            continue
        if ch == "%":
            break
        out.append(ch)
        i += 1
    return "".join(out)


def _builtin_check(source: str,
                   resource_dir: str | Path | None) -> CompileResult:
    problems: list[str] = []
    stripped_lines = [_strip_comments(l) for l in source.split("\n")]
    text = "\n".join(stripped_lines)

    if "\\documentclass" not in text:
        problems.append("missing \\documentclass")
    if "\\begin{document}" not in text:
        problems.append("missing \\begin{document}")
    if "\\end{document}" not in text:
        problems.append("missing \\end{document}")

    doc_start = text.find("\\begin{document}")
    if doc_start != -1:
        body = text[doc_start:]
        if "\\documentclass" in body:
            problems.append("\\documentclass after \\begin{document}")
        if "\\usepackage" in body:
            problems.append("\\usepackage after \\begin{document}")

    depth = 0
    math_toggles = 0
    for lineno, line in enumerate(stripped_lines, start=1):
        i = 0
        while i < len(line):
            ch = line[i]
            if ch == "\\" and i + 1 < len(line):
                i += 2
                continue
            if ch == "{":
                depth += 1
            elif ch == "}":
                depth -= 1
                if depth < 0:
                    problems.append(f"unbalanced '}}' at line {lineno}")
                    depth = 0
            elif ch == "$":
                math_toggles += 1
            i += 1
    if depth > 0:
        problems.append(f"{depth} unclosed '{{'")
    if math_toggles % 2 != 0:
        problems.append("unbalanced math-mode '$'")

    env_stack: list[tuple[str, int]] = []
    for lineno, line in enumerate(stripped_lines, start=1):
        for match in re.finditer(r"\\(begin|end)\{([^}]*)\}", line):
            which, name = match.group(1), match.group(2)
            if which == "begin":
                env_stack.append((name, lineno))
            else:
                if not env_stack:
                    problems.append(
                        f"\\end{{{name}}} without \\begin at line {lineno}")
                else:
                    open_name, open_line = env_stack.pop()
                    if open_name != name:
                        problems.append(
                            f"\\begin{{{open_name}}} (line {open_line})"
                            f" closed by \\end{{{name}}} at line {lineno}")
    for open_name, open_line in env_stack:
        problems.append(f"unclosed \\begin{{{open_name}}} at line {open_line}")

    available = set()
    if resource_dir is not None:
        res = Path(resource_dir)
        if res.is_dir():
            available = {p.name for p in res.iterdir() if p.is_file()}
    for match in _GRAPHICS_RE.finditer(text):
        target = Path(match.group(1)).name
        if target not in available:
            problems.append(f"graphics file not found: {match.group(1)}")

    if problems:
        log = "\n".join(f"builtin-check: error: {p}" for p in problems)
        return CompileResult(ok=False, log=log[-LOG_TAIL_CHARS:])
    return CompileResult(ok=True, log="builtin-check: ok")
