// DOM wiring for the co-pilot console.
//
// The page is stateless with respect to the run: on load (and on every
// reconnect) it rebuilds the view from the control API, then folds live
// events in. Refreshing can never lose or alter pipeline state.

import { ApiError, ControlApiClient } from "./api.js";
import {
  RunView,
  applyEvent,
  fromSnapshot,
  phaseStatus,
  reconcile,
  validateDecision,
} from "./viewmodel.js";
import type { DecisionForm, RunSummary } from "./types.js";
import { PHASES } from "./types.js";

const api = new ControlApiClient("");

function el<K extends keyof HTMLElementTagNameMap>(
    tag: K, className?: string, text?: string): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function clear(node: HTMLElement): void {
  while (node.firstChild) node.removeChild(node.firstChild);
}

async function main(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) return;
  const params = new URLSearchParams(window.location.search);
  const runId = params.get("run");
  if (runId) {
    await showRun(root, runId);
  } else {
    await showRunList(root);
  }
}

async function showRunList(root: HTMLElement): Promise<void> {
  clear(root);
  root.appendChild(el("h1", "", "runs"));
  const list = el("div", "run-list");
  root.appendChild(list);
  const render = (runs: RunSummary[]) => {
    clear(list);
    for (const run of runs) {
      const row = el("a", `run-row status-${run.status}`);
      (row as HTMLAnchorElement).href = `?run=${encodeURIComponent(run.run_id)}`;
      row.appendChild(el("span", "run-id", run.run_id));
      row.appendChild(el("span", "run-topic", run.topic));
      row.appendChild(el("span", "run-status", run.status));
      list.appendChild(row);
    }
    if (runs.length === 0) list.appendChild(el("p", "empty", "no runs yet"));
  };
  try {
    render(await api.listRuns());
  } catch (error) {
    showBanner(root, `cannot reach the control API: ${error}`, () =>
      showRunList(root));
    return;
  }
  setInterval(async () => {
    try {
      render(await api.listRuns());
    } catch {
      /* keep the last list; the next tick retries */
    }
  }, 3000);
}

async function showRun(root: HTMLElement, runId: string): Promise<void> {
  clear(root);
  let view: RunView;
  try {
    view = fromSnapshot(await api.getRun(runId));
  } catch (error) {
    showBanner(root, `run ${runId} unavailable: ${error}`, () =>
      showRun(root, runId));
    return;
  }

  const header = el("div", "header");
  const timeline = el("div", "timeline");
  const gate = el("div", "gate-panel");
  const outputs = el("div", "outputs");
  const telemetry = el("div", "telemetry");
  const decisions = el("div", "decisions");
  for (const section of [header, timeline, gate, outputs, telemetry, decisions]) {
    root.appendChild(section);
  }

  const rerender = () => {
    renderHeader(header, view);
    renderTimeline(timeline, view, (phase) => void renderOutput(outputs, view, phase));
    renderGate(gate, view, submitDecision);
    renderTelemetry(telemetry, view);
    renderDecisions(decisions, view);
  };

  const submitDecision = async (form: DecisionForm) => {
    if (!view.pendingGate) return;
    const errors = validateDecision(form);
    if (errors.length > 0) {
      renderGateError(gate, errors.join("; "));
      return;
    }
    try {
      await api.postDecision(view.runId, view.pendingGate.phase, form);
    } catch (error) {
      if (error instanceof ApiError && error.conflict) {
        renderGateError(gate, "already decided");
        view = reconcile(view, await api.getRun(runId), view.lastSeq);
        rerender();
        return;
      }
      renderGateError(gate, String(error));
    }
  };

  api.subscribeEvents(runId, {
    after: 0,
    onEvent: (event) => {
      view = applyEvent(view, event);
      rerender();
    },
    onError: async () => {
      // stream dropped: converge the view back to the API's state
      try {
        view = reconcile(view, await api.getRun(runId), view.lastSeq);
        rerender();
      } catch {
        showBanner(root, "control API unreachable; retrying", () =>
          showRun(root, runId));
      }
    },
  });
  rerender();
  void renderOutput(outputs, view, view.currentPhase);
}

function renderHeader(node: HTMLElement, view: RunView): void {
  clear(node);
  node.appendChild(el("h1", "", view.runId));
  node.appendChild(el("p", "topic", `topic: ${view.topic}`));
  node.appendChild(el("p", `status status-${view.status}`,
                      `${view.status} — ${view.currentPhase}` +
                      (view.rewinds ? ` (rewinds: ${view.rewinds})` : "")));
}

function renderTimeline(node: HTMLElement, view: RunView,
                        onSelect: (phase: string) => void): void {
  clear(node);
  for (const phase of PHASES) {
    const chip = el("button", `phase phase-${phaseStatus(view, phase)}`, phase);
    chip.addEventListener("click", () => onSelect(phase));
    node.appendChild(chip);
  }
}

function renderGate(node: HTMLElement, view: RunView,
                    submit: (form: DecisionForm) => Promise<void>): void {
  clear(node);
  if (!view.pendingGate) {
    node.classList.remove("open");
    return;
  }
  node.classList.add("open");
  node.appendChild(el("h2", "", `checkpoint: ${view.pendingGate.phase}`));
  node.appendChild(el("p", "hint",
                      "review the phase output, then proceed or retry with notes"));
  const notes = el("textarea", "notes") as HTMLTextAreaElement;
  notes.placeholder = "notes for a retry, one per line";
  const error = el("p", "gate-error");
  const proceed = el("button", "proceed", "proceed");
  proceed.addEventListener("click", () =>
    void submit({ choice: "proceed", notes: [] }));
  const retry = el("button", "retry", "retry with notes");
  retry.addEventListener("click", () =>
    void submit({
      choice: "retry",
      notes: notes.value.split("\n").filter((line) => line.trim()),
    }));
  for (const child of [notes, proceed, retry, error]) node.appendChild(child);
}

function renderGateError(node: HTMLElement, message: string): void {
  const target = node.querySelector(".gate-error");
  if (target) target.textContent = message;
}

async function renderOutput(node: HTMLElement, view: RunView,
                            phase: string): Promise<void> {
  clear(node);
  node.appendChild(el("h2", "", `output: ${phase}`));
  let output = view.outputs[phase];
  if (output === undefined) {
    try {
      output = (await api.getOutput(view.runId, phase)).output;
    } catch {
      node.appendChild(el("p", "empty", "no output yet"));
      return;
    }
  }
  const record = output as Record<string, unknown>;
  if (typeof record["report"] === "string") {
    // report preview: raw LaTeX source (compiled output lives on disk)
    node.appendChild(el("pre", "report", record["report"] as string));
    return;
  }
  node.appendChild(el("pre", "json", JSON.stringify(record, null, 2)));
}

function renderTelemetry(node: HTMLElement, view: RunView): void {
  clear(node);
  if (view.telemetry.length === 0) return;
  node.appendChild(el("h2", "", "telemetry"));
  const table = el("table");
  const head = el("tr");
  for (const title of ["phase", "seconds", "cost USD", "attempts", "ok"]) {
    head.appendChild(el("th", "", title));
  }
  table.appendChild(head);
  for (const row of view.telemetry) {
    const tr = el("tr");
    tr.appendChild(el("td", "", row.phase));
    tr.appendChild(el("td", "", row.wall_time.toFixed(2)));
    tr.appendChild(el("td", "", row.cost));
    tr.appendChild(el("td", "", String(row.attempts)));
    tr.appendChild(el("td", "", row.succeeded ? "yes" : "no"));
    table.appendChild(tr);
  }
  node.appendChild(table);
}

function renderDecisions(node: HTMLElement, view: RunView): void {
  clear(node);
  if (view.decisions.length === 0) return;
  node.appendChild(el("h2", "", "decisions"));
  for (const record of view.decisions) {
    const line = record.notes.length
      ? `${record.phase}: ${record.decision} — ${record.notes.join("; ")}`
      : `${record.phase}: ${record.decision}`;
    node.appendChild(el("p", "decision", line));
  }
}

function showBanner(root: HTMLElement, message: string,
                    retry: () => void): void {
  clear(root);
  const banner = el("div", "banner error");
  banner.appendChild(el("p", "", message));
  const button = el("button", "", "retry");
  button.addEventListener("click", retry);
  banner.appendChild(button);
  root.appendChild(banner);
}

void main();
