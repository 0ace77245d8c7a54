import io
import json
import socket
import threading
import time

import pytest
import requests

from researchflow.cli import main
from researchflow.core import PhaseId

from . import mockscripts


def _write_script(tmp_path, responses, name="script.json"):
    path = tmp_path / name
    path.write_text(json.dumps({"responses": responses}))
    return str(path)


def _write_config(tmp_path, config, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(config.to_flat_dict()))
    return str(path)


@pytest.fixture
def happy(tmp_path):
    config = mockscripts.tiny_run_config()
    script = _write_script(tmp_path, mockscripts.full_run_script(config))
    config_path = _write_config(tmp_path, config)
    fixtures = tmp_path / "tool-fixtures"
    mockscripts.record_tool_fixtures(fixtures)
    return {
        "config": config_path,
        "script": script,
        "fixtures": str(fixtures),
        "runs_dir": str(tmp_path / "runs"),
    }


def _run_args(happy, run_id="cli-run", extra=()):
    return ["run", "--topic", "does word order matter",
            "--mode", "autonomous", "--seed", "3",
            "--config", happy["config"],
            "--mock-script", happy["script"],
            "--tool-fixtures", happy["fixtures"],
            "--runs-dir", happy["runs_dir"],
            "--run-id", run_id, *extra]


def test_run_happy_path_exit_zero(happy, tmp_path):
    out = io.StringIO()
    code = main(_run_args(happy), stdout=out)
    assert code == 0
    text = out.getvalue()
    assert "report.tex" in text
    assert (tmp_path / "runs" / "cli-run" / "report.tex").exists()


def test_missing_topic_is_usage_error(happy):
    with pytest.raises(SystemExit) as exc:
        main(["run", "--mode", "autonomous"])
    assert exc.value.code == 2


def test_status_and_report_after_run(happy):
    main(_run_args(happy, run_id="cli-two"), stdout=io.StringIO())
    out = io.StringIO()
    assert main(["status", "cli-two", "--runs-dir", happy["runs_dir"]],
                stdout=out) == 0
    assert "complete" in out.getvalue()

    out = io.StringIO()
    assert main(["report", "cli-two", "--runs-dir", happy["runs_dir"]],
                stdout=out) == 0
    table = out.getvalue()
    for phase in PhaseId:
        assert phase.label in table
    assert "total" in table


def test_report_json_has_seven_rows(happy):
    main(_run_args(happy, run_id="cli-json"), stdout=io.StringIO())
    out = io.StringIO()
    assert main(["report", "cli-json", "--runs-dir", happy["runs_dir"],
                 "--json"], stdout=out) == 0
    payload = json.loads(out.getvalue())
    assert len(payload["telemetry"]) == 7


def test_report_unknown_run_is_failure(happy):
    out = io.StringIO()
    assert main(["report", "missing", "--runs-dir", happy["runs_dir"]],
                stdout=out) == 1


def test_failed_run_exits_one(happy, tmp_path):
    config = mockscripts.tiny_run_config(
        max_steps={**mockscripts.tiny_run_config().max_steps,
                   PhaseId.LITERATURE_REVIEW: 1})
    script = _write_script(
        tmp_path, ["no commands at all", "still none"], name="bad.json")
    code = main(["run", "--topic", "t", "--config",
                 _write_config(tmp_path, config, name="bad-config.json"),
                 "--mock-script", script,
                 "--runs-dir", happy["runs_dir"], "--run-id", "fails"],
                stdout=io.StringIO())
    assert code == 1


def test_headless_copilot_reads_stdin(happy, tmp_path, monkeypatch):
    # a retry at the plan gate, then proceeds everywhere
    config = mockscripts.tiny_run_config()
    script_responses = (
        mockscripts.lit_review_block(config) + mockscripts.plan_block()
        + mockscripts.plan_block() + mockscripts.dataprep_block()
        + mockscripts.experiments_block(config)
        + mockscripts.interpretation_block()
        + mockscripts.report_block(config)
        + mockscripts.refinement_block(config))
    script = _write_script(tmp_path, script_responses, name="copilot.json")
    decisions = iter(["proceed", "retry: include paper X"]
                     + ["proceed"] * 10)
    monkeypatch.setattr("sys.stdin",
                        io.StringIO("\n".join(decisions) + "\n"))
    code = main(["run", "--topic", "t", "--mode", "copilot",
                 "--config", happy["config"],
                 "--mock-script", script,
                 "--tool-fixtures", happy["fixtures"],
                 "--runs-dir", happy["runs_dir"], "--run-id", "copilot-run"],
                stdout=io.StringIO())
    assert code == 0
    state = json.loads((tmp_path / "runs" / "copilot-run"
                        / "state.json").read_text())
    assert state["task"]["notes"]["plan formulation"] == ["include paper X"]


def _free_port():
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


def test_serve_and_decide_over_http(happy, tmp_path):
    port = _free_port()
    config = mockscripts.tiny_run_config()
    script = _write_script(tmp_path,
                           mockscripts.full_run_script(config),
                           name="serve.json")
    result = {}

    def run_pipeline():
        result["code"] = main(
            ["run", "--topic", "t", "--mode", "copilot", "--serve",
             "--port", str(port), "--config", happy["config"],
             "--mock-script", script, "--tool-fixtures", happy["fixtures"],
             "--runs-dir", happy["runs_dir"], "--run-id", "served"],
            stdout=io.StringIO())

    thread = threading.Thread(target=run_pipeline, daemon=True)
    thread.start()
    base = f"http://127.0.0.1:{port}"
    api = f"{base}/runs/served"

    def wait_gate(timeout=30.0):
        deadline = time.monotonic() + timeout
        while time.monotonic() < deadline:
            try:
                state = requests.get(api, timeout=5).json()
                if state.get("pending_gate"):
                    return state["pending_gate"]
            except requests.RequestException:
                pass
            time.sleep(0.05)
        raise AssertionError("no gate became pending")

    while thread.is_alive():
        try:
            phase = wait_gate()
        except AssertionError:
            break
        code = main(["decide", "served", phase, "proceed",
                     "--api-url", base], stdout=io.StringIO())
        assert code in (0, 1)  # 1 when the gate was just consumed
        time.sleep(0.02)
    thread.join(timeout=60)
    assert result["code"] == 0


def test_decide_retry_requires_note():
    assert main(["decide", "x", "plan formulation", "retry"],
                stdout=io.StringIO()) == 2


def test_notes_file_reaches_run_state(happy, tmp_path):
    notes_path = tmp_path / "notes.json"
    notes_path.write_text(json.dumps(
        {"running experiments": ["use tiny datasets"]}))
    code = main(_run_args(happy, run_id="noted",
                          extra=("--notes-file", str(notes_path))),
                stdout=io.StringIO())
    assert code == 0
    state = json.loads((tmp_path / "runs" / "noted"
                        / "state.json").read_text())
    assert state["task"]["notes"]["running experiments"] == [
        "use tiny datasets"]
