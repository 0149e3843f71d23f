// Event wiring and request lifecycle. Bound queries are debounced and
// the newest request wins; stale or aborted responses never reach the
// screen.

import { ApiError, Client } from "./api.js";
import { parseStudyCsv } from "./csv.js";
import { renderMatrix, renderNotice, renderReadout, renderTable } from "./render.js";
import {
  AppState,
  boundViewFromAnswer,
  initialState,
  selectedLabels,
  sortOrder,
  toggleKnownNull,
  toggleSort,
  type SortKey,
} from "./state.js";

export const BOUND_DEBOUNCE_MS = 150;

export interface Scheduler {
  /** Arm the timer (restarting it if armed) and return the new token. */
  schedule(): number;
  /** True while `token` is still the most recently issued one. */
  isCurrent(token: number): boolean;
  cancel(): void;
}

/**
 * Debounce plus latest-wins bookkeeping. `fire` runs once the delay
 * elapses with no newer schedule; responses must check `isCurrent`
 * before touching state.
 */
export function createScheduler(fire: (token: number) => void, delayMs: number): Scheduler {
  let timer: ReturnType<typeof setTimeout> | null = null;
  let token = 0;
  return {
    schedule(): number {
      token += 1;
      const t = token;
      if (timer !== null) clearTimeout(timer);
      timer = setTimeout(() => {
        timer = null;
        fire(t);
      }, delayMs);
      return t;
    },
    isCurrent(t: number): boolean {
      return t === token;
    },
    cancel(): void {
      if (timer !== null) clearTimeout(timer);
      timer = null;
      token += 1;
    },
  };
}

interface Elements {
  csvInput: HTMLTextAreaElement;
  fileInput: HTMLInputElement;
  alphaInput: HTMLInputElement;
  methodSelect: HTMLSelectElement;
  startBtn: HTMLButtonElement;
  startError: HTMLElement;
  readout: HTMLElement;
  tableWrap: HTMLElement;
  selectAll: HTMLButtonElement;
  selectNone: HTMLButtonElement;
  dualWrap: HTMLElement;
}

function grab(doc: Document, id: string): HTMLElement {
  const el = doc.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el;
}

export function wireApp(doc: Document, client: Client): void {
  const els: Elements = {
    csvInput: grab(doc, "csv-input") as HTMLTextAreaElement,
    fileInput: grab(doc, "file-input") as HTMLInputElement,
    alphaInput: grab(doc, "alpha-input") as HTMLInputElement,
    methodSelect: grab(doc, "method-select") as HTMLSelectElement,
    startBtn: grab(doc, "start-btn") as HTMLButtonElement,
    startError: grab(doc, "start-error"),
    readout: grab(doc, "readout"),
    tableWrap: grab(doc, "table-wrap"),
    selectAll: grab(doc, "select-all") as HTMLButtonElement,
    selectNone: grab(doc, "select-none") as HTMLButtonElement,
    dualWrap: grab(doc, "dual-wrap"),
  };

  const state: AppState = initialState();
  let inflight: AbortController | null = null;

  const paintReadout = () => {
    els.readout.innerHTML = renderReadout(state.bound);
  };
  const paintTable = () => {
    if (!state.study) {
      els.tableWrap.innerHTML = "";
      return;
    }
    els.tableWrap.innerHTML = renderTable(state.study, {
      order: sortOrder(state.study, state.sortKey, state.sortDir),
      selected: state.selected,
      sortKey: state.sortKey,
      sortDir: state.sortDir,
    });
  };
  const paintDual = () => {
    if (state.dualNotice !== null) {
      els.dualWrap.innerHTML = renderNotice(state.dualNotice);
    } else if (state.dual && state.study) {
      els.dualWrap.innerHTML = renderMatrix(state.study.labels, {
        rows: state.dual.rows,
        knownNulls: state.knownNulls,
        implicated: state.dual.implicated,
        truncated: state.dual.truncated,
      });
    } else {
      els.dualWrap.innerHTML = "";
    }
  };

  const scheduler = createScheduler(async (token) => {
    if (!state.session) return;
    if (inflight) inflight.abort();
    const ctl = new AbortController();
    inflight = ctl;
    try {
      const ans = await client.bound(state.session.id, selectedLabels(state), ctl.signal);
      if (!scheduler.isCurrent(token)) return;
      state.bound = boundViewFromAnswer(ans);
    } catch (err) {
      if (ctl.signal.aborted || !scheduler.isCurrent(token)) return;
      state.bound = { kind: "error", message: err instanceof Error ? err.message : String(err) };
    } finally {
      if (inflight === ctl) inflight = null;
    }
    paintReadout();
  }, BOUND_DEBOUNCE_MS);

  const requestBound = () => {
    if (!state.session) return;
    state.bound = { kind: "pending" };
    paintReadout();
    scheduler.schedule();
  };

  const refreshDual = async () => {
    if (!state.session || !state.study) return;
    if (!state.session.exactAvailable) return;
    try {
      if (state.knownNulls.size === 0) {
        const fam = await client.dual(state.session.id);
        state.dual = { rows: fam.sets, implicated: [], truncated: fam.truncated };
      } else {
        const ans = await client.condition(state.session.id, [...state.knownNulls]);
        state.dual = { rows: ans.surviving, implicated: ans.implicated, truncated: ans.truncated };
      }
      state.dualNotice = null;
    } catch (err) {
      state.dual = null;
      state.dualNotice = err instanceof Error ? err.message : String(err);
    }
    paintDual();
  };

  const startSession = async () => {
    els.startError.textContent = "";
    let study;
    try {
      study = parseStudyCsv(els.csvInput.value);
    } catch (err) {
      els.startError.textContent = err instanceof Error ? err.message : String(err);
      return;
    }
    const alpha = Number(els.alphaInput.value);
    try {
      const session = await client.createSession(
        study.labels,
        study.pvalues,
        alpha,
        els.methodSelect.value,
      );
      state.study = study;
      state.session = session;
      state.selected = new Set();
      state.knownNulls = new Set();
      state.dual = null;
      if (session.exactAvailable) {
        state.dualNotice = null;
      } else {
        // the API refuses family endpoints at this size; fetch the
        // refusal once so the notice text comes from the service
        try {
          await client.dual(session.id);
        } catch (err) {
          state.dualNotice =
            err instanceof ApiError ? err.message : err instanceof Error ? err.message : String(err);
        }
      }
      paintTable();
      paintDual();
      requestBound();
      if (session.exactAvailable) void refreshDual();
    } catch (err) {
      els.startError.textContent = err instanceof Error ? err.message : String(err);
    }
  };

  els.startBtn.addEventListener("click", () => void startSession());

  els.fileInput.addEventListener("change", () => {
    const file = els.fileInput.files?.[0];
    if (!file) return;
    void file.text().then((text) => {
      els.csvInput.value = text;
    });
  });

  els.tableWrap.addEventListener("change", (ev) => {
    const target = ev.target as HTMLElement;
    if (target instanceof HTMLInputElement && target.dataset.index !== undefined) {
      const i = Number(target.dataset.index);
      if (target.checked) state.selected.add(i);
      else state.selected.delete(i);
      requestBound();
    }
  });

  els.tableWrap.addEventListener("click", (ev) => {
    const th = (ev.target as HTMLElement).closest("th.sortable") as HTMLElement | null;
    if (th && th.dataset.sortKey) {
      toggleSort(state, th.dataset.sortKey as SortKey);
      paintTable();
    }
  });

  els.selectAll.addEventListener("click", () => {
    if (!state.study) return;
    state.selected = new Set(state.study.labels.map((_, i) => i));
    paintTable();
    requestBound();
  });

  els.selectNone.addEventListener("click", () => {
    state.selected = new Set();
    paintTable();
    requestBound();
  });

  els.dualWrap.addEventListener("click", (ev) => {
    const btn = (ev.target as HTMLElement).closest("button.null-toggle") as HTMLElement | null;
    if (btn && btn.dataset.label !== undefined) {
      toggleKnownNull(state, btn.dataset.label);
      void refreshDual();
    }
  });
}
