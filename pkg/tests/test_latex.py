import pytest

from researchflow.errors import CompilerMissingError
from researchflow.tools import compile_latex

MINIMAL = """\\documentclass{article}
\\title{Research Report: Minimal}
\\author{Agent Laboratory}
\\begin{document}
\\maketitle
hello
\\end{document}
"""


def test_minimal_document_compiles():
    result = compile_latex(MINIMAL, compiler="builtin")
    assert result.ok, result.log


def test_unbalanced_brace_fails_with_log():
    broken = MINIMAL.replace("\\title{Research Report: Minimal}",
                             "\\title{Research Report: Minimal")
    result = compile_latex(broken, compiler="builtin")
    assert not result.ok
    assert "{" in result.log or "brace" in result.log.lower() or "unclosed" in result.log


def test_missing_document_markers_fail():
    result = compile_latex("just some text", compiler="builtin")
    assert not result.ok


def test_mismatched_environment_fails():
    src = MINIMAL.replace("hello", "\\begin{itemize}\nhello\n\\end{enumerate}")
    result = compile_latex(src, compiler="builtin")
    assert not result.ok


def test_package_in_body_fails():
    src = MINIMAL.replace("hello", "\\usepackage{graphicx}")
    result = compile_latex(src, compiler="builtin")
    assert not result.ok


def test_comments_do_not_confuse_brace_count():
    src = MINIMAL.replace("hello", "hello % { unbalanced in comment\n50\\% of it")
    result = compile_latex(src, compiler="builtin")
    assert result.ok, result.log


def test_unescaped_dollar_fails():
    src = MINIMAL.replace("hello", "one $ alone")
    result = compile_latex(src, compiler="builtin")
    assert not result.ok


def test_graphics_must_exist(tmp_path):
    src = MINIMAL.replace("hello", "\\includegraphics[width=1in]{Figure_1.png}")
    result = compile_latex(src, compiler="builtin", resource_dir=tmp_path)
    assert not result.ok
    (tmp_path / "Figure_1.png").write_bytes(b"png")
    result = compile_latex(src, compiler="builtin", resource_dir=tmp_path)
    assert result.ok, result.log


def test_explicit_missing_compiler_raises():
    with pytest.raises(CompilerMissingError):
        compile_latex(MINIMAL, compiler="definitely-not-a-compiler")


def test_auto_mode_never_raises_for_document_problems():
    result = compile_latex("\\documentclass{article}")
    assert not result.ok
