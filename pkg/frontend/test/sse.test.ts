import assert from "node:assert/strict";
import { test } from "node:test";

import { SseParser } from "../src/sse.js";

test("parses a single message", () => {
  const parser = new SseParser();
  const messages = parser.push('id: 3\nevent: phase_started\ndata: {"seq":3}\n\n');
  assert.equal(messages.length, 1);
  assert.deepEqual(messages[0], {
    id: "3", event: "phase_started", data: '{"seq":3}',
  });
});

test("handles chunks split mid-line", () => {
  const parser = new SseParser();
  assert.deepEqual(parser.push("da"), []);
  assert.deepEqual(parser.push("ta: hel"), []);
  assert.deepEqual(parser.push("lo\n"), []);
  const messages = parser.push("\n");
  assert.equal(messages[0]?.data, "hello");
});

test("joins multi-line data and skips comments", () => {
  const parser = new SseParser();
  const messages = parser.push(": keep-alive\ndata: a\ndata: b\n\n");
  assert.equal(messages[0]?.data, "a\nb");
});

test("multiple messages in one chunk arrive in order", () => {
  const parser = new SseParser();
  const messages = parser.push("data: 1\n\ndata: 2\n\ndata: 3\n\n");
  assert.deepEqual(messages.map((m) => m.data), ["1", "2", "3"]);
});

test("crlf line endings are tolerated", () => {
  const parser = new SseParser();
  const messages = parser.push("data: x\r\n\r\n");
  assert.equal(messages[0]?.data, "x");
});
