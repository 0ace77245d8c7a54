// Wire types mirroring the control API's JSON payloads.

export type RunStatus = "running" | "awaiting_decision" | "complete" | "failed";

export interface RunSummary {
  run_id: string;
  status: RunStatus;
  phase: string;
  pending_gate: string | null;
  topic: string;
  mode: string;
}

export interface TelemetryRow {
  phase: string;
  wall_time: number;
  cost: string;
  attempts: number;
  succeeded: boolean;
}

export interface RunStateJson {
  run_id: string;
  task: {
    topic: string;
    notes: Record<string, string[]>;
    mode: string;
    seed: number;
  };
  phase: string;
  status: RunStatus;
  outputs: Record<string, unknown>;
  attempt: Record<string, number>;
  telemetry: TelemetryRow[];
  pending_gate: string | null;
  failed_phase: string | null;
  rewinds_used: number;
}

export interface RunEvent {
  run_id: string;
  seq: number;
  kind: string;
  payload: Record<string, unknown>;
}

export interface PhaseOutputResponse {
  run_id: string;
  phase: string;
  output: Record<string, unknown>;
}

export interface DecisionForm {
  choice: "proceed" | "retry";
  notes: string[];
}

export interface DecisionResponse {
  accepted: boolean;
  decision_id: string;
}

export const PHASES = [
  "literature review",
  "plan formulation",
  "data preparation",
  "running experiments",
  "results interpretation",
  "report writing",
  "report refinement",
] as const;
