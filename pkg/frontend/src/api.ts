// Thin client for the orchestrator control API.
//
// Live updates prefer the server-push event stream; if the stream drops or
// streaming is unavailable, a polling fallback replays missed events from
// the last seen sequence number, so consumers always converge.

import { SseParser } from "./sse.js";
import type {
  DecisionForm,
  DecisionResponse,
  PhaseOutputResponse,
  RunEvent,
  RunStateJson,
  RunSummary,
} from "./types.js";

export interface EventSubscription {
  close(): void;
}

export interface SubscribeOptions {
  after?: number;
  onEvent: (event: RunEvent) => void;
  onError?: (error: unknown) => void;
  /** polling cadence when the stream is unavailable, in ms */
  pollIntervalMs?: number;
}

export class ControlApiClient {
  constructor(private readonly baseUrl: string,
              private readonly token?: string) {}

  private headers(): Record<string, string> {
    return this.token ? { Authorization: `Bearer ${this.token}` } : {};
  }

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(`${this.baseUrl}${path}`, {
      ...init,
      headers: { ...this.headers(), ...(init?.headers ?? {}) },
    });
    if (!response.ok) {
      const body = await response.text().catch(() => "");
      throw new ApiError(response.status, body);
    }
    return (await response.json()) as T;
  }

  listRuns(): Promise<RunSummary[]> {
    return this.json<RunSummary[]>("/runs");
  }

  getRun(runId: string): Promise<RunStateJson> {
    return this.json<RunStateJson>(`/runs/${encodeURIComponent(runId)}`);
  }

  getOutput(runId: string, phase: string): Promise<PhaseOutputResponse> {
    return this.json<PhaseOutputResponse>(
      `/runs/${encodeURIComponent(runId)}/output/${encodeURIComponent(phase)}`);
  }

  postDecision(runId: string, phase: string, form: DecisionForm,
               decisionId?: string): Promise<DecisionResponse> {
    return this.json<DecisionResponse>(
      `/runs/${encodeURIComponent(runId)}/decision`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({
          phase,
          decision: form.choice,
          notes: form.notes,
          ...(decisionId ? { decision_id: decisionId } : {}),
        }),
      });
  }

  /** One finite (non-live) fetch of events after a sequence number. */
  async fetchEventsAfter(runId: string, after: number): Promise<RunEvent[]> {
    const response = await fetch(
      `${this.baseUrl}/runs/${encodeURIComponent(runId)}/events` +
      `?after=${after}&live=false`,
      { headers: this.headers() });
    if (!response.ok) throw new ApiError(response.status, "");
    const parser = new SseParser();
    const events: RunEvent[] = [];
    const text = await response.text();
    for (const message of parser.push(text + "\n")) {
      events.push(JSON.parse(message.data) as RunEvent);
    }
    return events;
  }

  /**
   * Follow a run's events from `after`. Streams when possible, reconnects
   * on drops, and degrades to polling; either way events arrive in order
   * with strictly increasing seq.
   */
  subscribeEvents(runId: string, options: SubscribeOptions): EventSubscription {
    let closed = false;
    let lastSeq = options.after ?? 0;
    const pollInterval = options.pollIntervalMs ?? 1500;
    const controller = { current: null as AbortController | null };

    const deliver = (event: RunEvent) => {
      if (event.seq > lastSeq) {
        lastSeq = event.seq;
        options.onEvent(event);
      }
    };

    const streamOnce = async (): Promise<void> => {
      const abort = new AbortController();
      controller.current = abort;
      const response = await fetch(
        `${this.baseUrl}/runs/${encodeURIComponent(runId)}/events` +
        `?after=${lastSeq}`,
        { headers: this.headers(), signal: abort.signal });
      if (!response.ok || !response.body) {
        throw new ApiError(response.status, "no stream body");
      }
      const reader = response.body.getReader();
      const decoder = new TextDecoder();
      const parser = new SseParser();
      for (;;) {
        const { done, value } = await reader.read();
        if (done) return;
        for (const message of parser.push(decoder.decode(value, { stream: true }))) {
          deliver(JSON.parse(message.data) as RunEvent);
        }
        if (closed) return;
      }
    };

    const pollOnce = async (): Promise<void> => {
      const events = await this.fetchEventsAfter(runId, lastSeq);
      for (const event of events) deliver(event);
    };

    const loop = async (): Promise<void> => {
      let streamFailures = 0;
      while (!closed) {
        try {
          if (streamFailures < 3) {
            await streamOnce();
            // stream ended cleanly (terminal run); check for stragglers
            await pollOnce();
            return;
          }
          await pollOnce();
          await sleep(pollInterval);
        } catch (error) {
          if (closed) return;
          streamFailures += 1;
          options.onError?.(error);
          await sleep(Math.min(500 * streamFailures, 3000));
        }
      }
    };

    void loop();
    return {
      close() {
        closed = true;
        controller.current?.abort();
      },
    };
  }
}

export class ApiError extends Error {
  constructor(readonly status: number, body: string) {
    super(`API error ${status}${body ? `: ${body}` : ""}`);
  }

  get conflict(): boolean {
    return this.status === 409;
  }
}

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}
