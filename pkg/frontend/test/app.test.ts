// @vitest-environment jsdom
// Full wiring test in a DOM with a stubbed fetch: upload, toggling,
// debounced readout updates, dual panel, and known-null conditioning.

import { beforeEach, describe, expect, it } from "vitest";

import { Client, type FetchLike } from "../src/api.js";
import { wireApp } from "../src/controller.js";

const SHELL = `
  <textarea id="csv-input">label,p
h1,0.01
h2,0.02
h3,0.9</textarea>
  <input type="file" id="file-input">
  <input id="alpha-input" value="0.05">
  <select id="method-select"><option value="simes" selected>simes</option></select>
  <button id="start-btn"></button>
  <div id="start-error"></div>
  <div id="readout"></div>
  <div id="table-wrap"></div>
  <button id="select-all"></button>
  <button id="select-none"></button>
  <div id="dual-wrap"></div>
`;

const sleep = (ms: number) => new Promise((r) => setTimeout(r, ms));

interface StubState {
  conditioned: boolean;
  requests: string[];
}

/** Stub service for the demo study: canned answers, no arithmetic. */
function demoStub(state: StubState): FetchLike {
  const json = (status: number, body: unknown) =>
    Promise.resolve(
      new Response(JSON.stringify(body), {
        status,
        headers: { "content-type": "application/json" },
      }),
    );
  return (url, init) => {
    state.requests.push(url);
    if (url === "/api/sessions") {
      return json(201, { id: "deadbeef", m: 3, exact_available: true });
    }
    if (url.startsWith("/api/sessions/deadbeef/bound")) {
      const ids = decodeURIComponent(url.split("ids=")[1] ?? "");
      const set = ids === "" ? [] : ids.split(",");
      if (ids === "h3") {
        return json(400, { code: "validation", message: "stub refuses h3", field: "label" });
      }
      const d = set.length === 3 ? 2 : set.length === 0 ? 0 : 9;
      return json(200, { set, d, alpha: 0.05 });
    }
    if (url.endsWith("/dual")) {
      return json(200, { sets: [["h1", "h2"]], truncated: false });
    }
    if (url.endsWith("/condition")) {
      const body = JSON.parse(String(init?.body));
      state.conditioned = body.known_true_nulls.length > 0;
      return state.conditioned
        ? json(200, { surviving: [], implicated: [], truncated: false })
        : json(200, { surviving: [["h1", "h2"]], implicated: ["h1", "h2"], truncated: false });
    }
    return json(404, { code: "not_found", message: url });
  };
}

describe("app flow on the demo study", () => {
  let state: StubState;

  beforeEach(() => {
    document.body.innerHTML = SHELL;
    state = { conditioned: false, requests: [] };
    wireApp(document, new Client("", demoStub(state)));
  });

  const start = async () => {
    (document.getElementById("start-btn") as HTMLButtonElement).click();
    await sleep(250);
  };

  it("starts a session, renders the table, and answers d=0 for the empty selection", async () => {
    await start();
    const table = document.getElementById("table-wrap")!.innerHTML;
    expect(table).toContain("h1");
    expect(table).toContain("h3");
    expect(document.getElementById("readout")!.textContent).toContain(
      "selected 0, at least 0 true discoveries",
    );
  });

  it("select-all shows the service's d for the full set after the debounce", async () => {
    await start();
    (document.getElementById("select-all") as HTMLButtonElement).click();
    const pending = document.getElementById("readout")!.textContent;
    expect(pending).toContain("computing");
    await sleep(250);
    expect(document.getElementById("readout")!.textContent).toContain(
      "selected 3, at least 2 true discoveries (level 0.05)",
    );
  });

  it("rapid toggling collapses to one bound request", async () => {
    await start();
    const before = state.requests.filter((u) => u.includes("/bound")).length;
    const boxes = document.querySelectorAll<HTMLInputElement>("#table-wrap input[type=checkbox]");
    for (const box of boxes) {
      box.checked = true;
      box.dispatchEvent(new Event("change", { bubbles: true }));
    }
    await sleep(250);
    const after = state.requests.filter((u) => u.includes("/bound")).length;
    expect(after - before).toBe(1);
  });

  it("renders the dual matrix and empties it when h1 is marked a known null", async () => {
    await start();
    await sleep(50);
    let dual = document.getElementById("dual-wrap")!;
    expect(dual.innerHTML).toContain("●");

    (dual.querySelector('button.null-toggle[data-label="h1"]') as HTMLButtonElement).click();
    await sleep(50);
    dual = document.getElementById("dual-wrap")!;
    expect(dual.innerHTML).toContain("no explanations remain");
    expect(dual.innerHTML).not.toContain("●");

    // unmark: restored via a fresh API answer
    (dual.querySelector('button.null-toggle[data-label="h1"]') as HTMLButtonElement).click();
    await sleep(50);
    expect(document.getElementById("dual-wrap")!.innerHTML).toContain("●");
  });

  it("displays the server's d verbatim for a single selection", async () => {
    await start();
    const box = document.querySelector<HTMLInputElement>("#table-wrap input[data-index='0']")!;
    box.checked = true;
    box.dispatchEvent(new Event("change", { bubbles: true }));
    await sleep(250);
    // the stub answers an absurd d=9; the UI must not second-guess it
    expect(document.getElementById("readout")!.textContent).toContain("at least 9");
  });

  it("surfaces API errors inline and keeps the selection", async () => {
    await start();
    const h3 = document.querySelector<HTMLInputElement>("#table-wrap input[data-index='2']")!;
    h3.checked = true;
    h3.dispatchEvent(new Event("change", { bubbles: true }));
    await sleep(250);
    expect(document.getElementById("readout")!.textContent).toContain("stub refuses h3");
    expect(
      document.querySelector<HTMLInputElement>("#table-wrap input[data-index='2']")!.checked,
    ).toBe(true);
  });

  it("sorts by column on header click", async () => {
    await start();
    const th = document.querySelector<HTMLElement>('th[data-sort-key="label"]')!;
    th.click();
    const html = document.getElementById("table-wrap")!.innerHTML;
    expect(html).toContain("label ▲");
  });
});
