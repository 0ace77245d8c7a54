import assert from "node:assert/strict";
import { test } from "node:test";

import type { RunEvent, RunStateJson } from "../src/types.js";
import {
  applyEvent,
  fromSnapshot,
  phaseStatus,
  reconcile,
  validateDecision,
} from "../src/viewmodel.js";

function snapshot(overrides: Partial<RunStateJson> = {}): RunStateJson {
  return {
    run_id: "r1",
    task: { topic: "word order", notes: {}, mode: "copilot", seed: 1 },
    phase: "literature review",
    status: "running",
    outputs: {},
    attempt: {},
    telemetry: [],
    pending_gate: null,
    failed_phase: null,
    rewinds_used: 0,
    ...overrides,
  };
}

function event(seq: number, kind: string,
               payload: Record<string, unknown> = {}): RunEvent {
  return { run_id: "r1", seq, kind, payload };
}

test("gate panel appears when the snapshot is awaiting a decision", () => {
  const view = fromSnapshot(snapshot({
    status: "awaiting_decision",
    pending_gate: "literature review",
  }));
  assert.equal(view.pendingGate?.phase, "literature review");
  assert.equal(phaseStatus(view, "literature review"), "gated");
});

test("gate events open and close the panel", () => {
  let view = fromSnapshot(snapshot());
  view = applyEvent(view, event(1, "gate_requested",
                                { phase: "plan formulation" }));
  assert.equal(view.pendingGate?.phase, "plan formulation");
  assert.equal(view.status, "awaiting_decision");
  view = applyEvent(view, event(2, "gate_decided",
                                { phase: "plan formulation",
                                  decision: "proceed", notes: [] }));
  assert.equal(view.pendingGate, null);
  assert.equal(view.status, "running");
  assert.deepEqual(view.decisions, [
    { phase: "plan formulation", decision: "proceed", notes: [] },
  ]);
});

test("retry decisions record their notes and reopen the phase", () => {
  let view = fromSnapshot(snapshot({
    outputs: { "plan formulation": { text: "v1" } },
  }));
  assert.ok(view.completedPhases.includes("plan formulation"));
  view = applyEvent(view, event(1, "gate_decided", {
    phase: "plan formulation", decision: "retry",
    notes: ["include paper X"],
  }));
  assert.deepEqual(view.notes["plan formulation"], ["include paper X"]);
  assert.ok(!view.completedPhases.includes("plan formulation"));
});

test("stale or duplicate events are ignored", () => {
  let view = fromSnapshot(snapshot(), 5);
  const before = view;
  view = applyEvent(view, event(4, "run_failed", { phase: "x" }));
  assert.equal(view, before);
});

test("rewound events roll completed phases back", () => {
  let view = fromSnapshot(snapshot({
    outputs: {
      "literature review": {}, "plan formulation": {},
      "data preparation": {}, "running experiments": {},
    },
  }));
  view = applyEvent(view, event(1, "rewound",
                                { to: "data preparation", rewinds_used: 1 }));
  assert.deepEqual(view.completedPhases,
                   ["literature review", "plan formulation"]);
  assert.equal(view.currentPhase, "data preparation");
  assert.equal(view.rewinds, 1);
});

test("terminal events settle the status", () => {
  let view = fromSnapshot(snapshot());
  view = applyEvent(view, event(1, "run_completed", {}));
  assert.equal(view.status, "complete");
  let failed = fromSnapshot(snapshot());
  failed = applyEvent(failed, event(1, "run_failed",
                                    { phase: "literature review" }));
  assert.equal(failed.status, "failed");
  assert.equal(failed.failedPhase, "literature review");
});

test("reconcile converges to the snapshot but keeps decision history", () => {
  let view = fromSnapshot(snapshot());
  view = applyEvent(view, event(1, "gate_requested",
                                { phase: "literature review" }));
  view = applyEvent(view, event(2, "gate_decided", {
    phase: "literature review", decision: "proceed", notes: [],
  }));
  const fresh = snapshot({
    phase: "plan formulation",
    outputs: { "literature review": { papers: [] } },
  });
  const merged = reconcile(view, fresh, 2);
  assert.equal(merged.currentPhase, "plan formulation");
  assert.equal(merged.decisions.length, 1);
  assert.ok(merged.completedPhases.includes("literature review"));
});

test("a rebuilt view equals one maintained incrementally", () => {
  // simulate: phase 1 completes, gate decided, phase 2 starts
  let incremental = fromSnapshot(snapshot());
  incremental = applyEvent(incremental, event(1, "phase_started",
                                              { phase: "literature review" }));
  incremental = applyEvent(incremental, event(2, "phase_completed",
                                              { phase: "literature review" }));
  incremental = applyEvent(incremental, event(3, "gate_decided", {
    phase: "literature review", decision: "proceed", notes: [],
  }));
  incremental = applyEvent(incremental, event(4, "phase_started",
                                              { phase: "plan formulation" }));
  const refreshed = fromSnapshot(snapshot({
    phase: "plan formulation",
    outputs: { "literature review": { papers: [] } },
  }), 4);
  assert.equal(incremental.currentPhase, refreshed.currentPhase);
  assert.deepEqual(incremental.completedPhases, refreshed.completedPhases);
  assert.equal(incremental.status, refreshed.status);
  assert.equal(incremental.pendingGate, refreshed.pendingGate);
});

test("decision validation mirrors the API contract", () => {
  assert.deepEqual(validateDecision({ choice: "proceed", notes: [] }), []);
  assert.deepEqual(validateDecision({ choice: "retry",
                                      notes: ["add a baseline"] }), []);
  assert.ok(validateDecision({ choice: "retry", notes: [] }).length > 0);
  assert.ok(validateDecision({ choice: "retry", notes: ["  "] }).length > 0);
});
