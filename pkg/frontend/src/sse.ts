// Minimal incremental parser for text/event-stream bodies.
//
// Works on fetch ReadableStream chunks in both browsers and Node, so the
// console does not depend on a global EventSource implementation.

export interface SseMessage {
  id?: string;
  event?: string;
  data: string;
}

export class SseParser {
  private buffer = "";
  private current: { id?: string; event?: string; data: string[] } = { data: [] };

  /** Feed a decoded chunk; returns any messages completed by it. */
  push(chunk: string): SseMessage[] {
    this.buffer += chunk;
    const messages: SseMessage[] = [];
    let newlineAt: number;
    while ((newlineAt = this.buffer.indexOf("\n")) !== -1) {
      let line = this.buffer.slice(0, newlineAt);
      this.buffer = this.buffer.slice(newlineAt + 1);
      if (line.endsWith("\r")) line = line.slice(0, -1);
      if (line === "") {
        const message = this.flush();
        if (message) messages.push(message);
        continue;
      }
      if (line.startsWith(":")) continue; // comment / keep-alive
      const colon = line.indexOf(":");
      const field = colon === -1 ? line : line.slice(0, colon);
      let value = colon === -1 ? "" : line.slice(colon + 1);
      if (value.startsWith(" ")) value = value.slice(1);
      if (field === "data") this.current.data.push(value);
      else if (field === "event") this.current.event = value;
      else if (field === "id") this.current.id = value;
    }
    return messages;
  }

  private flush(): SseMessage | null {
    if (this.current.data.length === 0 && !this.current.event) {
      this.current = { data: [] };
      return null;
    }
    const message: SseMessage = {
      data: this.current.data.join("\n"),
      ...(this.current.event !== undefined ? { event: this.current.event } : {}),
      ...(this.current.id !== undefined ? { id: this.current.id } : {}),
    };
    this.current = { data: [] };
    return message;
  }
}
