"""HTTP/JSON control API: list runs, inspect state and phase outputs,
stream live events (server-push), and post checkpoint-gate decisions.

The CLI and the browser console are both thin clients of these endpoints;
every fact either one shows is obtainable here.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

from fastapi import Depends, FastAPI, HTTPException, Request
from fastapi.responses import StreamingResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from ..core import PhaseId
from ..errors import (ConflictError, CorruptStateError, ResearchFlowError,
                      RunNotFoundError)
from .events import EventLog
from .pipeline import GateHub, PipelineRunner
from .state import HumanDecision, RunState, load_state


@dataclass
class RunHandle:
    run_id: str
    get_state: Callable[[], RunState]
    events: EventLog
    hub: GateHub | None = None
    thread: threading.Thread | None = None


class RunRegistry:
    """Live runs by id, with persisted runs on disk as a fallback."""

    def __init__(self, runs_root: str | Path):
        self.runs_root = Path(runs_root)
        self._handles: dict[str, RunHandle] = {}
        self._lock = threading.Lock()

    def register(self, handle: RunHandle) -> None:
        with self._lock:
            self._handles[handle.run_id] = handle

    def register_runner(self, runner: PipelineRunner,
                        hub: GateHub | None = None,
                        thread: threading.Thread | None = None) -> RunHandle:
        handle = RunHandle(run_id=runner.run_id,
                           get_state=lambda: runner.state,
                           events=runner.events, hub=hub, thread=thread)
        self.register(handle)
        return handle

    def get(self, run_id: str) -> RunHandle | None:
        with self._lock:
            return self._handles.get(run_id)

    def state_of(self, run_id: str) -> RunState:
        handle = self.get(run_id)
        if handle is not None:
            return handle.get_state()
        run_dir = self.runs_root / run_id
        return load_state(run_dir)  # raises RunNotFound / CorruptState

    def list_runs(self) -> list[RunState]:
        states: dict[str, RunState] = {}
        if self.runs_root.is_dir():
            for child in sorted(self.runs_root.iterdir()):
                if (child / "state.json").exists():
                    try:
                        states[child.name] = load_state(child)
                    except (RunNotFoundError, CorruptStateError):
                        continue
        with self._lock:
            for run_id, handle in self._handles.items():
                states[run_id] = handle.get_state()
        return list(states.values())

    def events_of(self, run_id: str) -> EventLog:
        handle = self.get(run_id)
        if handle is not None:
            return handle.events
        path = self.runs_root / run_id / "events.jsonl"
        if not path.exists():
            raise RunNotFoundError(f"unknown run: {run_id}")
        return EventLog(run_id, path)


class DecisionBody(BaseModel):
    phase: str
    decision: str  # "proceed" | "retry"
    notes: list[str] = []
    decision_id: Optional[str] = None


def _state_summary(state: RunState) -> dict:
    return {
        "run_id": state.run_id,
        "status": state.status.value,
        "phase": state.phase.label,
        "pending_gate": state.pending_gate.label if state.pending_gate else None,
        "topic": state.task.topic,
        "mode": state.task.mode.value,
    }


def create_app(registry: RunRegistry, token: str | None = None,
               console_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="researchflow control API")

    def check_auth(request: Request) -> None:
        if token is None:
            return
        header = request.headers.get("authorization", "")
        if header != f"Bearer {token}":
            raise HTTPException(status_code=401, detail="bad token")

    def get_state_or_404(run_id: str) -> RunState:
        try:
            return registry.state_of(run_id)
        except RunNotFoundError:
            raise HTTPException(status_code=404, detail="unknown run")
        except CorruptStateError as exc:
            raise HTTPException(status_code=500, detail=str(exc))

    @app.get("/runs")
    def list_runs(_=Depends(check_auth)):
        return [_state_summary(s) for s in registry.list_runs()]

    @app.get("/runs/{run_id}")
    def get_run(run_id: str, _=Depends(check_auth)):
        return get_state_or_404(run_id).to_json()

    @app.get("/runs/{run_id}/output/{phase_label}")
    def get_output(run_id: str, phase_label: str, _=Depends(check_auth)):
        state = get_state_or_404(run_id)
        try:
            phase = PhaseId.from_label(phase_label)
        except ValueError:
            raise HTTPException(status_code=404, detail="unknown phase")
        if phase not in state.outputs:
            raise HTTPException(status_code=404, detail="no output yet")
        return {"run_id": run_id, "phase": phase.label,
                "output": state.outputs[phase]}

    @app.get("/runs/{run_id}/events")
    def stream_events(run_id: str, request: Request, after: int = 0,
                      live: bool = True, _=Depends(check_auth)):
        try:
            log = registry.events_of(run_id)
        except RunNotFoundError:
            raise HTTPException(status_code=404, detail="unknown run")

        def terminal() -> bool:
            try:
                return registry.state_of(run_id).status.value in (
                    "complete", "failed")
            except ResearchFlowError:
                return True

        def generate():
            seq = after
            idle_rounds = 0
            while True:
                events = (log.wait_since(seq, timeout=1.0) if live
                          else log.since(seq))
                for event in events:
                    seq = event.seq
                    payload = json.dumps(event.to_json())
                    yield f"id: {event.seq}\nevent: {event.kind}\ndata: {payload}\n\n"
                if not live:
                    return
                if events:
                    idle_rounds = 0
                    continue
                idle_rounds += 1
                if terminal() and not log.since(seq):
                    return
                if idle_rounds % 15 == 0:
                    yield ": keep-alive\n\n"

        return StreamingResponse(generate(), media_type="text/event-stream")

    @app.post("/runs/{run_id}/decision")
    def post_decision(run_id: str, body: DecisionBody, _=Depends(check_auth)):
        handle = registry.get(run_id)
        if handle is None:
            try:
                registry.state_of(run_id)
            except RunNotFoundError:
                raise HTTPException(status_code=404, detail="unknown run")
            raise HTTPException(status_code=409,
                                detail="run is not live; no gate to decide")
        if handle.hub is None:
            raise HTTPException(status_code=409,
                                detail="run accepts no decisions")
        try:
            phase = PhaseId.from_label(body.phase)
        except ValueError:
            raise HTTPException(status_code=404, detail="unknown phase")
        kwargs = {}
        if body.decision_id:
            kwargs["decision_id"] = body.decision_id
        try:
            if body.decision == "proceed":
                decision = HumanDecision(proceed=True, **kwargs)
            elif body.decision == "retry":
                decision = HumanDecision(proceed=False,
                                         notes=tuple(body.notes), **kwargs)
            else:
                raise HTTPException(status_code=422,
                                    detail="decision must be proceed or retry")
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        try:
            handle.hub.post(phase, decision)
        except ConflictError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        return {"accepted": True, "decision_id": decision.decision_id}

    if console_dir is not None and Path(console_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(console_dir), html=True),
                  name="console")

    return app
