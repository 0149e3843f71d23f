// Pure selection and sorting state, kept separate from the DOM so it
// can be unit tested in node.

import type { BoundAnswer, SessionInfo } from "./api.js";

export interface Study {
  labels: string[];
  pvalues: number[];
}

export type SortKey = "label" | "p";
export type SortDir = "asc" | "desc";

export type BoundView =
  | { kind: "idle" }
  | { kind: "pending" }
  | { kind: "ok"; selected: number; d: number; alpha: number }
  | { kind: "error"; message: string };

export interface DualView {
  rows: string[][];
  implicated: string[];
  truncated: boolean;
}

export interface AppState {
  study: Study | null;
  session: SessionInfo | null;
  selected: Set<number>;
  knownNulls: Set<string>;
  sortKey: SortKey;
  sortDir: SortDir;
  bound: BoundView;
  dual: DualView | null;
  dualNotice: string | null;
}

export function initialState(): AppState {
  return {
    study: null,
    session: null,
    selected: new Set(),
    knownNulls: new Set(),
    sortKey: "p",
    sortDir: "asc",
    bound: { kind: "idle" },
    dual: null,
    dualNotice: null,
  };
}

/** Row order for the hypothesis table; stable within ties. */
export function sortOrder(study: Study, key: SortKey, dir: SortDir): number[] {
  const idx = study.labels.map((_, i) => i);
  const sign = dir === "asc" ? 1 : -1;
  idx.sort((a, b) => {
    let cmp: number;
    if (key === "p") {
      const pa = study.pvalues[a]!;
      const pb = study.pvalues[b]!;
      cmp = pa < pb ? -1 : pa > pb ? 1 : 0;
    } else {
      cmp = study.labels[a]! < study.labels[b]! ? -1 : study.labels[a]! > study.labels[b]! ? 1 : 0;
    }
    return cmp !== 0 ? sign * cmp : a - b;
  });
  return idx;
}

export function toggleSort(state: AppState, key: SortKey): void {
  if (state.sortKey === key) {
    state.sortDir = state.sortDir === "asc" ? "desc" : "asc";
  } else {
    state.sortKey = key;
    state.sortDir = "asc";
  }
}

/** The readout is a verbatim projection of one /bound response. */
export function boundViewFromAnswer(ans: BoundAnswer): BoundView {
  return { kind: "ok", selected: ans.set.length, d: ans.d, alpha: ans.alpha };
}

export function selectedLabels(state: AppState): string[] {
  if (!state.study) return [];
  // label order follows study order so the query string is stable
  return state.study.labels.filter((_, i) => state.selected.has(i));
}

export function toggleKnownNull(state: AppState, label: string): void {
  if (state.knownNulls.has(label)) {
    state.knownNulls.delete(label);
  } else {
    state.knownNulls.add(label);
  }
}
