// Contract tests against a stub server: every number the UI renders
// must be a verbatim projection of an API response, and the request
// discipline (debounce, latest-wins) must hold.

import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiError, Client, type FetchLike } from "../src/api.js";
import { createScheduler } from "../src/controller.js";
import { renderReadout } from "../src/render.js";
import { boundViewFromAnswer } from "../src/state.js";

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

function stubFetch(handler: (url: string, init?: RequestInit) => Response): {
  fetchFn: FetchLike;
  calls: { url: string; init?: RequestInit }[];
} {
  const calls: { url: string; init?: RequestInit }[] = [];
  return {
    calls,
    fetchFn: (url, init) => {
      calls.push({ url, init });
      return Promise.resolve(handler(url, init));
    },
  };
}

describe("Client against a stub server", () => {
  it("creates a session and maps exact_available", async () => {
    const { fetchFn, calls } = stubFetch(() =>
      jsonResponse(201, { id: "abc123", m: 3, exact_available: true }),
    );
    const client = new Client("", fetchFn);
    const session = await client.createSession(["h1", "h2", "h3"], [0.01, 0.02, 0.9], 0.05, "simes");
    expect(session).toEqual({ id: "abc123", m: 3, exactAvailable: true });
    expect(calls[0]!.url).toBe("/api/sessions");
    expect(JSON.parse(String(calls[0]!.init!.body))).toEqual({
      labels: ["h1", "h2", "h3"],
      pvalues: [0.01, 0.02, 0.9],
      alpha: 0.05,
      method: "simes",
    });
  });

  it("encodes the selection into the bound query", async () => {
    const { fetchFn, calls } = stubFetch(() =>
      jsonResponse(200, { set: ["h1", "h2"], d: 2, alpha: 0.05 }),
    );
    await new Client("", fetchFn).bound("abc", ["h1", "h2"]);
    expect(calls[0]!.url).toBe("/api/sessions/abc/bound?ids=h1%2Ch2");
  });

  it("displays whatever d the server answers, even an absurd one", async () => {
    // d=7 for a 2-element set is statistically impossible; the UI must
    // show it anyway because it never computes bounds itself
    const { fetchFn } = stubFetch(() => jsonResponse(200, { set: ["a", "b"], d: 7, alpha: 0.05 }));
    const ans = await new Client("", fetchFn).bound("s", ["a", "b"]);
    const html = renderReadout(boundViewFromAnswer(ans));
    expect(html).toBe("selected 2, at least <strong>7</strong> true discoveries (level 0.05)");
  });

  it("maps error bodies onto ApiError", async () => {
    const { fetchFn } = stubFetch(() =>
      jsonResponse(400, { code: "validation", message: "unknown hypothesis label 'zzz'", field: "label" }),
    );
    const err = await new Client("", fetchFn).bound("s", ["zzz"]).catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(400);
    expect(err.code).toBe("validation");
    expect(err.field).toBe("label");
    expect(err.message).toContain("zzz");
  });

  it("turns non-JSON answers into bad_response", async () => {
    const { fetchFn } = stubFetch(() => new Response("<html>oops</html>", { status: 502 }));
    const err = await new Client("", fetchFn).dual("s").catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.code).toBe("bad_response");
  });

  it("posts known nulls and projects the condition answer", async () => {
    const { fetchFn, calls } = stubFetch(() =>
      jsonResponse(200, { surviving: [], implicated: [], truncated: false }),
    );
    const ans = await new Client("", fetchFn).condition("s", ["h1"]);
    expect(JSON.parse(String(calls[0]!.init!.body))).toEqual({ known_true_nulls: ["h1"] });
    expect(ans.surviving).toEqual([]);
  });
});

describe("createScheduler", () => {
  afterEach(() => {
    vi.useRealTimers();
  });

  it("collapses rapid schedules into one fire after the delay", () => {
    vi.useFakeTimers();
    const fired: number[] = [];
    const sched = createScheduler((t) => fired.push(t), 150);
    sched.schedule();
    vi.advanceTimersByTime(100);
    sched.schedule();
    vi.advanceTimersByTime(100);
    const last = sched.schedule();
    expect(fired).toEqual([]);
    vi.advanceTimersByTime(149);
    expect(fired).toEqual([]);
    vi.advanceTimersByTime(1);
    expect(fired).toEqual([last]);
  });

  it("lets only the newest token pass isCurrent", () => {
    vi.useFakeTimers();
    const sched = createScheduler(() => {}, 150);
    const t1 = sched.schedule();
    const t2 = sched.schedule();
    expect(sched.isCurrent(t1)).toBe(false);
    expect(sched.isCurrent(t2)).toBe(true);
  });

  it("cancel stops the pending fire and invalidates tokens", () => {
    vi.useFakeTimers();
    const fired: number[] = [];
    const sched = createScheduler((t) => fired.push(t), 150);
    const t = sched.schedule();
    sched.cancel();
    vi.advanceTimersByTime(1000);
    expect(fired).toEqual([]);
    expect(sched.isCurrent(t)).toBe(false);
  });
});
