// Study CSV parsing for the upload form. Format check only; range and
// duplicate validation belong to the service.

export interface ParsedStudy {
  labels: string[];
  pvalues: number[];
}

export function parseStudyCsv(text: string): ParsedStudy {
  const lines = text.split(/\r?\n/);
  const labels: string[] = [];
  const pvalues: number[] = [];
  let sawHeader = false;
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i]!.trim();
    if (line === "") continue;
    if (!sawHeader) {
      if (line.replace(/\s+/g, "") !== "label,p") {
        throw new Error(`line ${i + 1}: expected header "label,p", got "${line}"`);
      }
      sawHeader = true;
      continue;
    }
    const comma = line.indexOf(",");
    if (comma < 0) {
      throw new Error(`line ${i + 1}: expected "label,p-value"`);
    }
    const label = line.slice(0, comma).trim();
    const raw = line.slice(comma + 1).trim();
    if (label === "") {
      throw new Error(`line ${i + 1}: empty label`);
    }
    const p = Number(raw);
    if (raw === "" || !Number.isFinite(p)) {
      throw new Error(`line ${i + 1}: "${raw}" is not a number`);
    }
    labels.push(label);
    pvalues.push(p);
  }
  if (!sawHeader) {
    throw new Error('empty input: expected a "label,p" header');
  }
  if (labels.length === 0) {
    throw new Error("no data rows after the header");
  }
  return { labels, pvalues };
}
