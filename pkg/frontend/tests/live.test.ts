/**
 * End-to-end check against a real service process.
 *
 * Spawns `calnlu serve`, drives the shipped four-turn scheduling dialog
 * through the HTTP client exactly as the page would, and checks both the
 * verbatim replies and the resulting calendar grid model.
 */

import { spawn, ChildProcess } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { buildMonthGrid, monthBounds } from "../src/calendar.js";

const PORT = 8931;
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;
const client = new ApiClient(BASE);

async function waitForHealthy(timeoutMs: number): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    if (await client.health()) return;
    await new Promise((resolve) => setTimeout(resolve, 200));
  }
  throw new Error("service did not become healthy");
}

beforeAll(async () => {
  server = spawn(
    "calnlu",
    ["--today", "1994-06-01", "serve", "--port", String(PORT)],
    { stdio: "ignore" },
  );
  await waitForHealthy(30_000);
}, 40_000);

afterAll(() => {
  server.kill();
});

describe("live service", () => {
  it("walks the scheduling dialog and lands the event on the grid", async () => {
    const sessionId = await client.createSession();

    const turns: Array<[string, string]> = [
      ["Schedule a meeting with Bob!", "At what time and date?"],
      ["On August 30th.", "At what time?"],
      ["At 8.", "Morning or afternoon?"],
      [
        "In the evening.",
        'Scheduled "a meeting" on 1994-08-30 at 20:00 with bob.',
      ],
    ];

    for (const [text, expected] of turns.slice(0, 3)) {
      const payload = await client.sendUtterance(sessionId, text);
      expect(payload.reply).toBe(expected);
      expect(payload.executed).toBe(false);
      expect(payload.events_changed).toEqual([]);
    }

    const final = await client.sendUtterance(sessionId, turns[3][0]);
    expect(final.reply).toBe(turns[3][1]);
    expect(final.executed).toBe(true);
    expect(final.events_changed).toEqual(["ev1"]);
    expect(final.pending).toBeNull();

    // Poll-after-write: the page refreshes the month view now.
    const { start, end } = monthBounds(1994, 8);
    const events = await client.fetchEvents(start, end);
    const grid = buildMonthGrid(events, 1994, 8);
    const cell = grid.weeks.flat().find((c) => c.date === "1994-08-30");
    expect(cell?.events).toHaveLength(1);
    expect(cell?.events[0]).toMatchObject({
      name: "a meeting",
      time: "20:00",
      participants: ["bob"],
    });
  }, 30_000);

  it("keeps sessions separate and rejects unknown ones", async () => {
    const a = await client.createSession();
    const b = await client.createSession();
    expect(a).not.toBe(b);
    const res = await client.sendUtterance(b, "Cancel the meeting!");
    expect(typeof res.reply).toBe("string");
    await expect(client.sendUtterance("no-such-session", "hi")).rejects.toMatchObject(
      { status: 404 },
    );
  }, 30_000);
});
