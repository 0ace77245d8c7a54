"""Sandboxed execution of generated experiment code.

Generated programs are notorious for two hazards: process-terminating calls
(``exit()`` kills the harness) and host-shell invocations. Both are stripped
syntactically before the program runs in an isolated child process inside a
scratch directory, with a hard timeout and head+tail stdout truncation.
"""

from __future__ import annotations

import ast
import os
import shutil
import signal
import subprocess
import sys
import tempfile
import threading
import time
from dataclasses import dataclass
from pathlib import Path

from ..errors import SandboxSpawnError

# process-terminating calls are removed outright
EXIT_CALLS = {
    ("exit",), ("quit",),
    ("sys", "exit"), ("os", "_exit"), ("os", "abort"),
}
# host-shell invocations are neutralized (replaced by a no-op expression)
SHELL_CALLS = {
    ("os", "system"), ("os", "popen"), ("os", "execv"), ("os", "execvp"),
    ("os", "spawnl"),
    ("subprocess", "run"), ("subprocess", "Popen"), ("subprocess", "call"),
    ("subprocess", "check_call"), ("subprocess", "check_output"),
    ("subprocess", "getoutput"), ("subprocess", "getstatusoutput"),
}
BLOCKLIST = EXIT_CALLS | SHELL_CALLS

STDOUT_MARKER = "\n[...output truncated...]\n"


@dataclass(frozen=True)
class ExecutionResult:
    stdout: str
    error: str | None
    duration: float
    timed_out: bool

    @property
    def failed(self) -> bool:
        return self.timed_out or self.error is not None


def _dotted_name(node: ast.expr) -> tuple[str, ...] | None:
    parts: list[str] = []
    while isinstance(node, ast.Attribute):
        parts.append(node.attr)
        node = node.value
    if isinstance(node, ast.Name):
        parts.append(node.id)
        return tuple(reversed(parts))
    return None


class _CallStripper(ast.NodeTransformer):
    def __init__(self):
        self.stripped = 0

    def visit_Call(self, node: ast.Call):
        self.generic_visit(node)
        name = _dotted_name(node.func)
        if name in BLOCKLIST:
            self.stripped += 1
            return ast.copy_location(ast.Constant(value=None), node)
        return node


def _has_blocklisted_call(tree: ast.AST) -> bool:
    for node in ast.walk(tree):
        if isinstance(node, ast.Call) and _dotted_name(node.func) in BLOCKLIST:
            return True
    return False


def sanitize_code(code: str) -> str:
    """Strip blocklisted calls; code without any is returned unchanged.

    Matching is syntactic (on the parsed tree), so text inside string
    literals or comments can never trigger a rewrite. Code that does not
    parse is returned as-is; the interpreter will surface the syntax error
    as execution output.
    """
    try:
        tree = ast.parse(code)
    except SyntaxError:
        return code
    if not _has_blocklisted_call(tree):
        return code
    stripper = _CallStripper()
    new_tree = ast.fix_missing_locations(stripper.visit(tree))
    return ast.unparse(new_tree)


def truncate_stdout(text: str, budget: int) -> str:
    """Keep 75% head and 25% tail of the budget; errors live at the tail."""
    if len(text) <= budget:
        return text
    tail_len = budget // 4
    head_len = budget - tail_len - len(STDOUT_MARKER)
    if head_len < 0:
        return text[-budget:]
    return text[:head_len] + STDOUT_MARKER + text[-tail_len:]


def _resolve_interpreter(interpreter: str | None) -> str:
    if interpreter:
        found = shutil.which(interpreter)
        if found:
            return found
    return sys.executable


class Sandbox:
    """Runs one child process at a time in a throwaway working directory."""

    def __init__(self, *, interpreter: str | None = None,
                 stdout_budget: int = 10_000):
        self._interpreter = _resolve_interpreter(interpreter)
        self._stdout_budget = stdout_budget
        self._lock = threading.Lock()

    def execute(self, code: str, timeout: float,
                artifacts_dir: str | Path | None = None,
                collect: tuple[str, ...] = ("*.png", "*.json")) -> ExecutionResult:
        """Sanitize and run ``code``; compile and runtime failures are data.

        Files matching ``collect`` that the program leaves in its scratch
        directory are copied into ``artifacts_dir`` when one is given.
        """
        with self._lock:
            return self._execute(code, timeout, artifacts_dir, collect)

    def _execute(self, code, timeout, artifacts_dir, collect):
        scratch = Path(tempfile.mkdtemp(prefix="rf-sandbox-"))
        try:
            program = scratch / "program.py"
            program.write_text(sanitize_code(code))
            start = time.monotonic()
            try:
                proc = subprocess.Popen(
                    [self._interpreter, str(program)],
                    cwd=scratch,
                    stdout=subprocess.PIPE,
                    stderr=subprocess.PIPE,
                    text=True,
                    start_new_session=True,
                )
            except OSError as exc:
                raise SandboxSpawnError(f"could not start interpreter: {exc}")
            timed_out = False
            try:
                out, err = proc.communicate(timeout=timeout)
            except subprocess.TimeoutExpired:
                timed_out = True
                _kill_tree(proc)
                out, err = proc.communicate()
            duration = time.monotonic() - start
            out = truncate_stdout(out or "", self._stdout_budget)
            error: str | None = None
            if timed_out:
                error = None
            elif proc.returncode != 0:
                error = (err or "").strip() or f"exit status {proc.returncode}"
                error = truncate_stdout(error, self._stdout_budget)
            if artifacts_dir is not None:
                _collect_artifacts(scratch, Path(artifacts_dir), collect)
            return ExecutionResult(stdout=out, error=error,
                                   duration=duration, timed_out=timed_out)
        finally:
            shutil.rmtree(scratch, ignore_errors=True)


def _kill_tree(proc: subprocess.Popen) -> None:
    try:
        os.killpg(os.getpgid(proc.pid), signal.SIGKILL)
    except (ProcessLookupError, PermissionError):
        proc.kill()


def _collect_artifacts(scratch: Path, dest: Path,
                       patterns: tuple[str, ...]) -> None:
    dest.mkdir(parents=True, exist_ok=True)
    for pattern in patterns:
        for path in scratch.glob(pattern):
            if path.is_file() and path.name != "program.py":
                shutil.copy2(path, dest / path.name)
