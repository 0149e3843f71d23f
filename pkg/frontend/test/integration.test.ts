// End-to-end against the real service: spawn it, run the demo-study
// workflow through the app's own client and renderers, and check every
// displayed number against direct HTTP calls.

import { spawn, type ChildProcess } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiError, Client } from "../src/api.js";
import { renderMatrix, renderNotice, renderReadout } from "../src/render.js";
import { boundViewFromAnswer } from "../src/state.js";

const SERVER_SCRIPT = [
  "from tdbounds.service import make_server",
  "srv = make_server(port=0)",
  "print(srv.server_address[1], flush=True)",
  "srv.serve_forever(poll_interval=0.02)",
].join("\n");

let proc: ChildProcess;
let base: string;
let client: Client;

beforeAll(async () => {
  proc = spawn("python3", ["-c", SERVER_SCRIPT], { stdio: ["ignore", "pipe", "pipe"] });
  const port = await new Promise<number>((resolve, reject) => {
    let out = "";
    let err = "";
    const timer = setTimeout(() => reject(new Error(`service did not start: ${err}`)), 15000);
    proc.stdout!.on("data", (chunk: Buffer) => {
      out += chunk.toString();
      const line = out.split("\n")[0];
      if (line && /^\d+$/.test(line.trim())) {
        clearTimeout(timer);
        resolve(Number(line.trim()));
      }
    });
    proc.stderr!.on("data", (chunk: Buffer) => {
      err += chunk.toString();
    });
    proc.on("exit", (code) => reject(new Error(`service exited early (${code}): ${err}`)));
  });
  base = `http://127.0.0.1:${port}`;
  client = new Client(base);
}, 20000);

afterAll(() => {
  proc?.kill();
});

const DEMO = {
  labels: ["h1", "h2", "h3"],
  pvalues: [0.01, 0.02, 0.9],
};

async function directJson(path: string, init?: RequestInit): Promise<any> {
  const resp = await fetch(base + path, init);
  return resp.json();
}

describe("demo study end to end", () => {
  let id: string;

  beforeAll(async () => {
    const session = await client.createSession(DEMO.labels, DEMO.pvalues, 0.05, "simes");
    expect(session.m).toBe(3);
    expect(session.exactAvailable).toBe(true);
    id = session.id;
  });

  it("select-all shows d=2, matching a direct API call", async () => {
    const ans = await client.bound(id, DEMO.labels);
    const html = renderReadout(boundViewFromAnswer(ans));
    expect(html).toBe("selected 3, at least <strong>2</strong> true discoveries (level 0.05)");

    const direct = await directJson(`/api/sessions/${id}/bound?ids=h1%2Ch2%2Ch3`);
    expect(ans.d).toBe(direct.d);
    expect(ans.alpha).toBe(direct.alpha);
    expect(html).toContain(`<strong>${direct.d}</strong>`);
  });

  it("the empty selection and the h3-only selection both show d=0", async () => {
    const none = await client.bound(id, []);
    expect(renderReadout(boundViewFromAnswer(none))).toContain("at least <strong>0</strong>");
    const h3 = await client.bound(id, ["h3"]);
    expect(renderReadout(boundViewFromAnswer(h3))).toBe(
      "selected 1, at least <strong>0</strong> true discoveries (level 0.05)",
    );
    const direct = await directJson(`/api/sessions/${id}/bound?ids=h3`);
    expect(h3.d).toBe(direct.d);
  });

  it("the dual panel draws exactly one row {h1, h2}", async () => {
    const dual = await client.dual(id);
    expect(dual.sets).toEqual([["h1", "h2"]]);
    const html = renderMatrix(DEMO.labels, {
      rows: dual.sets,
      knownNulls: new Set(),
      implicated: [],
      truncated: dual.truncated,
    });
    expect((html.match(/<tr>/g) ?? []).length).toBe(2); // header + one set
    expect((html.match(/●/g) ?? []).length).toBe(2);

    const direct = await directJson(`/api/sessions/${id}/dual`);
    expect(dual.sets).toEqual(direct.sets);
  });

  it("marking h1 known-null empties the panel; unmarking restores it", async () => {
    const cond = await client.condition(id, ["h1"]);
    expect(cond.surviving).toEqual([]);
    expect(cond.implicated).toEqual([]);
    const html = renderMatrix(DEMO.labels, {
      rows: cond.surviving,
      knownNulls: new Set(["h1"]),
      implicated: cond.implicated,
      truncated: cond.truncated,
    });
    expect(html).toContain("no explanations remain");
    for (const lab of DEMO.labels) {
      expect(html).toMatch(new RegExp(`col-out[^>]*><button[^>]*data-label="${lab}"`));
    }

    const direct = await directJson(`/api/sessions/${id}/condition`, {
      method: "POST",
      body: JSON.stringify({ known_true_nulls: ["h1"] }),
    });
    expect(cond.surviving).toEqual(direct.surviving);

    // unmark: the restored matrix equals the original dual
    const restored = await client.condition(id, []);
    expect(restored.surviving).toEqual([["h1", "h2"]]);
  });

  it("unknown labels come back as field-tagged validation errors", async () => {
    const err = await client.bound(id, ["zzz"]).catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(400);
    expect(err.code).toBe("validation");
    expect(err.field).toBe("label");
  });
});

describe("large-study refusal", () => {
  it("renders the service's own 409 explanation for the dual panel", async () => {
    const m = 30;
    const labels = Array.from({ length: m }, (_, i) => `g${i}`);
    const pvalues = labels.map((_, i) => (i + 1) / (m + 1));
    const session = await client.createSession(labels, pvalues, 0.05, "simes");
    expect(session.exactAvailable).toBe(false);

    const err = await client.dual(session.id).catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(409);
    const html = renderNotice(err.message);
    expect(html).toContain("exact closure");
    expect(html).toContain(`m = ${m}`);

    // bounds still work at this size
    const ans = await client.bound(session.id, labels.slice(0, 5));
    expect(typeof ans.d).toBe("number");
  });
});
