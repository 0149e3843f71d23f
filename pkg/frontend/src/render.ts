// HTML-string renderers. Pure functions of state so tests can assert
// on output without a browser; the controller assigns the strings to
// innerHTML.

import type { BoundView, SortDir, SortKey, Study } from "./state.js";

export function escapeHtml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Live header line; the exact ok-state wording is part of the UI contract. */
export function renderReadout(view: BoundView): string {
  switch (view.kind) {
    case "idle":
      return '<span class="muted">no study loaded</span>';
    case "pending":
      return '<span class="pending">computing bound&hellip;</span>';
    case "ok":
      return (
        `selected ${view.selected}, at least <strong>${view.d}</strong> ` +
        `true discoveries (level ${view.alpha})`
      );
    case "error":
      return `<span class="error">${escapeHtml(view.message)}</span>`;
  }
}

export interface TableOpts {
  order: number[];
  selected: Set<number>;
  sortKey: SortKey;
  sortDir: SortDir;
}

export function renderTable(study: Study, opts: TableOpts): string {
  const arrow = (key: SortKey) =>
    opts.sortKey === key ? (opts.sortDir === "asc" ? " ▲" : " ▼") : "";
  const rows = opts.order
    .map((i) => {
      const label = escapeHtml(study.labels[i]!);
      const checked = opts.selected.has(i) ? " checked" : "";
      return (
        `<tr><td><input type="checkbox" data-index="${i}"${checked}></td>` +
        `<td>${label}</td><td class="num">${study.pvalues[i]}</td></tr>`
      );
    })
    .join("");
  return (
    '<table class="hyps"><thead><tr><th></th>' +
    `<th class="sortable" data-sort-key="label">label${arrow("label")}</th>` +
    `<th class="sortable num" data-sort-key="p">p${arrow("p")}</th>` +
    `</tr></thead><tbody>${rows}</tbody></table>`
  );
}

export interface MatrixOpts {
  rows: string[][];
  knownNulls: Set<string>;
  implicated: string[];
  truncated: boolean;
}

/**
 * Dot matrix of explanation sets: one row per set, one column per
 * hypothesis, a dot where the hypothesis belongs to the set. Columns
 * appearing in no remaining row are greyed; columns in every row
 * (implicated, per the API) are emphasized. Header cells double as
 * known-true-null toggles.
 */
export function renderMatrix(labels: string[], opts: MatrixOpts): string {
  const present = new Set<string>();
  for (const row of opts.rows) for (const lab of row) present.add(lab);
  const implicated = new Set(opts.implicated);

  const colClass = (lab: string) => {
    const cls: string[] = [];
    if (opts.knownNulls.has(lab)) cls.push("col-null");
    if (!present.has(lab)) cls.push("col-out");
    if (implicated.has(lab)) cls.push("col-implicated");
    return cls.length ? ` class="${cls.join(" ")}"` : "";
  };

  const head = labels
    .map((lab) => {
      const mark = opts.knownNulls.has(lab) ? " ⌀" : "";
      return (
        `<th${colClass(lab)}><button type="button" class="null-toggle" ` +
        `data-label="${escapeHtml(lab)}" title="toggle known true null">` +
        `${escapeHtml(lab)}${mark}</button></th>`
      );
    })
    .join("");

  const body = opts.rows
    .map((row) => {
      const members = new Set(row);
      const cells = labels
        .map((lab) => `<td${colClass(lab)}>${members.has(lab) ? "●" : ""}</td>`)
        .join("");
      return `<tr>${cells}</tr>`;
    })
    .join("");

  const empty =
    opts.rows.length === 0
      ? '<p class="muted">no explanations remain: every candidate is ruled out</p>'
      : "";
  const truncNote = opts.truncated
    ? '<p class="muted">listing truncated; only the first explanations are shown</p>'
    : "";
  return (
    `<table class="matrix"><thead><tr>${head}</tr></thead>` +
    `<tbody>${body}</tbody></table>${empty}${truncNote}`
  );
}

export function renderNotice(message: string): string {
  return `<p class="notice">${escapeHtml(message)}</p>`;
}
