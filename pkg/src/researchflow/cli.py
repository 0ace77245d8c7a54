"""Command-line front end: launch, resume, observe, and gate runs.

Exit codes are a stable scripting contract: 0 success, 1 run failure or
request rejection, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
import threading
import time
import uuid
from pathlib import Path

from .core import Config, Mode, PhaseId, ResearchTask, load_config
from .errors import ResearchFlowError
from .gateway import (Gateway, MockGateway, OpenAIStyleClient, PriceTable,
                      UsageLedger)
from .orchestrator import (GateHub, HubGate, HumanDecision, PipelineRunner,
                           RunStatus, Toolbox, load_state, resume_runner)
from .orchestrator.api import RunRegistry, create_app
from .orchestrator.pipeline import DecisionProvider
from .orchestrator.state import load_run_config
from .tools import (FixtureArxivClient, FixtureHubClient, HttpArxivClient,
                    HttpHubClient, Sandbox)

DEFAULT_RUNS_DIR = "runs"
DEFAULT_PORT = 8765


class TerminalGate:
    """Headless co-pilot gating: prompts on the terminal, decisions from
    standard input ("proceed", or "retry: <note>")."""

    def __init__(self, stdin=None, stdout=None):
        self.stdin = stdin or sys.stdin
        self.stdout = stdout or sys.stdout

    def decide(self, state, phase, output_summary) -> HumanDecision:
        print(f"\n=== checkpoint: {phase.label} ===", file=self.stdout)
        print(json.dumps(output_summary, indent=2)[:4000], file=self.stdout)
        while True:
            print("decision? [proceed | retry: <note>] ", file=self.stdout,
                  flush=True)
            line = self.stdin.readline()
            if not line:
                return HumanDecision.proceed_now()
            line = line.strip()
            if line.lower() in ("p", "proceed", ""):
                return HumanDecision.proceed_now()
            match = re.match(r"(?:retry|r)\b\s*:?\s*(.+)", line,
                             re.IGNORECASE | re.DOTALL)
            if match and match.group(1).strip():
                return HumanDecision.retry([match.group(1).strip()])
            print("unrecognized decision, try again", file=self.stdout)


def _build_gateway(args, config: Config) -> Gateway:
    prices = (PriceTable.from_file(args.price_table) if args.price_table
              else PriceTable.default())
    if args.mock_script:
        client = MockGateway.from_file(args.mock_script)
    else:
        client = OpenAIStyleClient()
    return Gateway(client=client, ledger=UsageLedger(prices),
                   text_budget=config.text_budget)


def _build_toolbox(args, config: Config) -> Toolbox:
    if args.tool_fixtures:
        arxiv = FixtureArxivClient(args.tool_fixtures,
                                   text_budget=config.text_budget)
        hub = FixtureHubClient(args.tool_fixtures)
    elif args.mock_script:
        # a scripted run must stay offline; unrecorded lookups come back empty
        fixtures = Path(args.runs_dir) / ".tool-fixtures"
        arxiv = FixtureArxivClient(fixtures, text_budget=config.text_budget)
        hub = FixtureHubClient(fixtures)
    else:
        arxiv = HttpArxivClient(text_budget=config.text_budget)
        hub = HttpHubClient()
    sandbox = Sandbox(interpreter=config.experiment_interpreter,
                      stdout_budget=config.stdout_budget)
    return Toolbox(arxiv=arxiv, hub=hub, sandbox=sandbox)


def _load_notes(path: str | None) -> dict[PhaseId, list[str]]:
    if not path:
        return {}
    raw = json.loads(Path(path).read_text())
    return {PhaseId.from_label(label): list(notes)
            for label, notes in raw.items()}


def _slug(text: str) -> str:
    cleaned = re.sub(r"[^a-z0-9]+", "-", text.lower()).strip("-")
    return cleaned[:40] or "run"


def _event_printer(runner: PipelineRunner, as_json: bool, stdout) -> threading.Thread:
    def follow():
        seq = 0
        while True:
            events = runner.events.wait_since(seq, timeout=0.5)
            for event in events:
                seq = event.seq
                if as_json:
                    print(json.dumps(event.to_json()), file=stdout, flush=True)
                else:
                    detail = event.payload.get("phase", "")
                    print(f"[{event.kind}] {detail}".rstrip(), file=stdout,
                          flush=True)
            if runner.state.status in (RunStatus.COMPLETE, RunStatus.FAILED) \
                    and not runner.events.since(seq):
                return

    thread = threading.Thread(target=follow, daemon=True)
    thread.start()
    return thread


def _serve_in_background(registry: RunRegistry, host: str, port: int,
                         console_dir: str | None):
    import uvicorn

    app = create_app(registry, console_dir=console_dir)
    server_config = uvicorn.Config(app, host=host, port=port,
                                   log_level="warning")
    server = uvicorn.Server(server_config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.monotonic() + 15
    while not server.started and time.monotonic() < deadline:
        time.sleep(0.02)
    return server, thread


def _finish(runner: PipelineRunner, printer: threading.Thread,
            as_json: bool, stdout) -> int:
    printer.join(timeout=10)
    state = runner.state
    report = runner.run_dir / "report.tex"
    if as_json:
        summary = state.to_json()
        summary["report_path"] = str(report) if report.exists() else None
        print(json.dumps(summary), file=stdout, flush=True)
    elif state.status is RunStatus.COMPLETE:
        print(f"run {state.run_id} complete; report at {report}",
              file=stdout, flush=True)
    else:
        failed_at = state.failed_phase.label if state.failed_phase else "?"
        print(f"run {state.run_id} failed at {failed_at}", file=stdout,
              flush=True)
    return 0 if state.status is RunStatus.COMPLETE else 1


def cmd_run(args, stdout) -> int:
    config = load_config(args.config) if args.config else Config()
    notes = _load_notes(args.notes_file)
    task = ResearchTask(topic=args.topic, notes=notes,
                        mode=Mode(args.mode), seed=args.seed)
    run_id = args.run_id or f"{_slug(args.topic)}-{args.seed}-{uuid.uuid4().hex[:6]}"
    runs_dir = Path(args.runs_dir)
    gateway = _build_gateway(args, config)
    toolbox = _build_toolbox(args, config)

    registry = RunRegistry(runs_dir)
    hub = None
    gate: DecisionProvider | None = None
    server = None
    if task.mode is Mode.COPILOT:
        if args.serve:
            hub = GateHub()
            timeout = config.checkpoint_timeout or None
            gate = HubGate(hub, timeout=timeout)
        else:
            gate = TerminalGate(stdout=stdout)

    runner = PipelineRunner(task=task, config=config, gateway=gateway,
                            toolbox=toolbox, run_dir=runs_dir / run_id,
                            run_id=run_id, gate=gate)
    registry.register_runner(runner, hub=hub)
    if args.serve:
        server, _ = _serve_in_background(registry, args.host, args.port,
                                         args.console_dir)
        print(f"control API at http://{args.host}:{args.port}", file=stdout,
              flush=True)
    printer = _event_printer(runner, args.json, stdout)
    try:
        runner.run()
    finally:
        code = _finish(runner, printer, args.json, stdout)
        if server is not None:
            if args.linger > 0:
                time.sleep(args.linger)
            server.should_exit = True
    return code


def cmd_resume(args, stdout) -> int:
    run_dir = Path(args.runs_dir) / args.run_id
    config = load_run_config(run_dir)
    gateway = _build_gateway(args, config)
    toolbox = _build_toolbox(args, config)
    state = load_state(run_dir)
    gate: DecisionProvider | None = None
    hub = None
    if state.task.mode is Mode.COPILOT:
        if args.serve:
            hub = GateHub()
            gate = HubGate(hub, timeout=config.checkpoint_timeout or None)
        else:
            gate = TerminalGate(stdout=stdout)
    runner = resume_runner(run_dir, gateway, toolbox, gate=gate)
    registry = RunRegistry(Path(args.runs_dir))
    registry.register_runner(runner, hub=hub)
    server = None
    if args.serve:
        server, _ = _serve_in_background(registry, args.host, args.port,
                                         args.console_dir)
    printer = _event_printer(runner, args.json, stdout)
    try:
        runner.run()
    finally:
        code = _finish(runner, printer, args.json, stdout)
        if server is not None:
            if args.linger > 0:
                time.sleep(args.linger)
            server.should_exit = True
    return code


def cmd_status(args, stdout) -> int:
    state = load_state(Path(args.runs_dir) / args.run_id)
    if args.json:
        print(json.dumps(state.to_json()), file=stdout)
    else:
        gate = state.pending_gate.label if state.pending_gate else "-"
        print(f"run: {state.run_id}\nstatus: {state.status.value}\n"
              f"phase: {state.phase.label}\npending gate: {gate}",
              file=stdout)
    return 0


def cmd_report(args, stdout) -> int:
    state = load_state(Path(args.runs_dir) / args.run_id)
    rows = [s.to_json() for s in state.telemetry]
    if args.json:
        print(json.dumps({"telemetry": rows,
                          "total_cost": str(state.total_cost()),
                          "total_wall_time": state.total_wall_time()}),
              file=stdout)
        return 0
    header = f"{'phase':<26} {'seconds':>8} {'cost USD':>12} {'att':>4} ok"
    print(header, file=stdout)
    print("-" * len(header), file=stdout)
    for row in rows:
        print(f"{row['phase']:<26} {row['wall_time']:>8.2f}"
              f" {row['cost']:>12} {row['attempts']:>4}"
              f" {'yes' if row['succeeded'] else 'no'}", file=stdout)
    print(f"{'total':<26} {state.total_wall_time():>8.2f}"
          f" {str(state.total_cost()):>12}", file=stdout)
    return 0


def cmd_decide(args, stdout) -> int:
    import requests

    if args.decision == "retry" and not args.note:
        print("retry requires at least one --note", file=sys.stderr)
        return 2
    payload = {"phase": args.phase, "decision": args.decision,
               "notes": args.note or []}
    url = f"{args.api_url.rstrip('/')}/runs/{args.run_id}/decision"
    try:
        resp = requests.post(url, json=payload, timeout=30)
    except requests.RequestException as exc:
        print(f"cannot reach control API: {exc}", file=sys.stderr)
        return 1
    if resp.status_code == 200:
        print("decision accepted", file=stdout)
        return 0
    print(f"decision rejected ({resp.status_code}): {resp.text}",
          file=sys.stderr)
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="researchflow",
        description="Run and steer autonomous research pipelines.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_common(p):
        p.add_argument("--runs-dir", default=DEFAULT_RUNS_DIR)
        p.add_argument("--json", action="store_true")

    def add_exec(p):
        p.add_argument("--mock-script",
                       help="JSON file of canned gateway responses; makes the"
                            " run deterministic and offline")
        p.add_argument("--tool-fixtures",
                       help="directory of recorded search/full-text responses")
        p.add_argument("--price-table")
        p.add_argument("--serve", action="store_true",
                       help="expose the control API while running")
        p.add_argument("--host", default="127.0.0.1")
        p.add_argument("--port", type=int, default=DEFAULT_PORT)
        p.add_argument("--console-dir",
                       help="static console assets to serve at /")
        p.add_argument("--linger", type=float, default=0.0,
                       help="seconds to keep serving after the run ends")

    run = sub.add_parser("run", help="start a new pipeline run")
    run.add_argument("--topic", required=True)
    run.add_argument("--notes-file")
    run.add_argument("--mode", choices=[m.value for m in Mode],
                     default=Mode.AUTONOMOUS.value)
    run.add_argument("--config")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--run-id")
    add_common(run)
    add_exec(run)
    run.set_defaults(func=cmd_run)

    resume = sub.add_parser("resume", help="resume a persisted run")
    resume.add_argument("run_id")
    add_common(resume)
    add_exec(resume)
    resume.set_defaults(func=cmd_resume)

    status = sub.add_parser("status", help="show a run's phase and status")
    status.add_argument("run_id")
    add_common(status)
    status.set_defaults(func=cmd_status)

    report = sub.add_parser("report", help="per-phase time/cost/attempts")
    report.add_argument("run_id")
    add_common(report)
    report.set_defaults(func=cmd_report)

    decide = sub.add_parser("decide", help="post a checkpoint decision")
    decide.add_argument("run_id")
    decide.add_argument("phase")
    decide.add_argument("decision", choices=["proceed", "retry"])
    decide.add_argument("--note", action="append")
    decide.add_argument("--api-url",
                        default=f"http://127.0.0.1:{DEFAULT_PORT}")
    decide.add_argument("--json", action="store_true")
    decide.set_defaults(func=cmd_decide)

    return parser


def main(argv: list[str] | None = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, stdout)
    except ResearchFlowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
