// Pure view-model for one run.
//
// Everything here is derived from control-API responses: a view can always
// be rebuilt from a fresh state snapshot (page refresh), and live events
// only ever move it toward the same state the next snapshot would produce.

import type { DecisionForm, RunEvent, RunStateJson, TelemetryRow } from "./types.js";
import { PHASES } from "./types.js";

export interface GatePanel {
  phase: string;
  requestedAtSeq: number | null;
}

export interface DecisionRecord {
  phase: string;
  decision: string;
  notes: string[];
}

export interface RunView {
  runId: string;
  topic: string;
  mode: string;
  status: string;
  currentPhase: string;
  completedPhases: string[];
  outputs: Record<string, unknown>;
  telemetry: TelemetryRow[];
  pendingGate: GatePanel | null;
  decisions: DecisionRecord[];
  notes: Record<string, string[]>;
  rewinds: number;
  failedPhase: string | null;
  lastSeq: number;
}

export function fromSnapshot(state: RunStateJson, lastSeq = 0): RunView {
  return {
    runId: state.run_id,
    topic: state.task.topic,
    mode: state.task.mode,
    status: state.status,
    currentPhase: state.phase,
    completedPhases: PHASES.filter((phase) => phase in state.outputs),
    outputs: state.outputs,
    telemetry: state.telemetry,
    pendingGate: state.pending_gate
      ? { phase: state.pending_gate, requestedAtSeq: null }
      : null,
    decisions: [],
    notes: state.task.notes,
    rewinds: state.rewinds_used,
    failedPhase: state.failed_phase,
    lastSeq,
  };
}

/** Fold one live event into the view. Unknown kinds are ignored. */
export function applyEvent(view: RunView, event: RunEvent): RunView {
  if (event.seq <= view.lastSeq) return view;
  const next: RunView = { ...view, lastSeq: event.seq };
  const phase = typeof event.payload.phase === "string"
    ? event.payload.phase : undefined;
  switch (event.kind) {
    case "phase_started":
      if (phase) next.currentPhase = phase;
      next.status = "running";
      break;
    case "phase_completed":
      if (phase && !next.completedPhases.includes(phase)) {
        next.completedPhases = [...next.completedPhases, phase];
      }
      break;
    case "gate_requested":
      if (phase) next.pendingGate = { phase, requestedAtSeq: event.seq };
      next.status = "awaiting_decision";
      break;
    case "gate_decided": {
      next.pendingGate = null;
      next.status = "running";
      const record: DecisionRecord = {
        phase: phase ?? "",
        decision: String(event.payload.decision ?? ""),
        notes: Array.isArray(event.payload.notes)
          ? (event.payload.notes as string[]) : [],
      };
      next.decisions = [...next.decisions, record];
      if (record.decision === "retry" && record.phase) {
        const existing = next.notes[record.phase] ?? [];
        next.notes = { ...next.notes,
                       [record.phase]: [...existing, ...record.notes] };
        next.completedPhases = next.completedPhases.filter(
          (done) => done !== record.phase);
      }
      break;
    }
    case "rewound":
      next.rewinds = Number(event.payload.rewinds_used ?? next.rewinds + 1);
      if (typeof event.payload.to === "string") {
        const target = PHASES.indexOf(
          event.payload.to as (typeof PHASES)[number]);
        next.completedPhases = next.completedPhases.filter(
          (done) => PHASES.indexOf(done as (typeof PHASES)[number]) < target);
        next.currentPhase = event.payload.to;
      }
      break;
    case "run_completed":
      next.status = "complete";
      next.pendingGate = null;
      break;
    case "run_failed":
      next.status = "failed";
      if (phase) next.failedPhase = phase;
      next.pendingGate = null;
      break;
    default:
      break;
  }
  return next;
}

/**
 * Reconcile with a fresh snapshot (reconnect, page refresh): the API is the
 * source of truth, but decision history accumulated from the stream is kept.
 */
export function reconcile(view: RunView, snapshot: RunStateJson,
                          lastSeq: number): RunView {
  const fresh = fromSnapshot(snapshot, Math.max(lastSeq, view.lastSeq));
  return { ...fresh, decisions: view.decisions };
}

/** Retry needs at least one non-empty note; proceed takes none. */
export function validateDecision(form: DecisionForm): string[] {
  const errors: string[] = [];
  if (form.choice !== "proceed" && form.choice !== "retry") {
    errors.push("choice must be proceed or retry");
  }
  if (form.choice === "retry") {
    const meaningful = form.notes.filter((note) => note.trim().length > 0);
    if (meaningful.length === 0) {
      errors.push("retry requires at least one non-empty note");
    }
  }
  return errors;
}

export function phaseStatus(view: RunView, phase: string):
    "done" | "active" | "gated" | "pending" | "failed" {
  if (view.failedPhase === phase) return "failed";
  if (view.pendingGate?.phase === phase) return "gated";
  if (view.completedPhases.includes(phase)) return "done";
  if (view.currentPhase === phase && view.status !== "complete") return "active";
  return "pending";
}
