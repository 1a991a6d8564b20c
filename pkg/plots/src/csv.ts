/**
 * Minimal RFC-4180 CSV reading with strict header validation.
 *
 * The figure renderers consume these tables verbatim; a missing column is
 * a hard error, never a silent default.
 */

import { readFileSync } from "node:fs";

export interface Table {
  header: string[];
  rows: string[][];
}

export function parseCsv(text: string): Table {
  const rows: string[][] = [];
  let field = "";
  let row: string[] = [];
  let inQuotes = false;
  let i = 0;
  const pushField = () => {
    row.push(field);
    field = "";
  };
  const pushRow = () => {
    pushField();
    rows.push(row);
    row = [];
  };
  while (i < text.length) {
    const ch = text[i];
    if (inQuotes) {
      if (ch === '"') {
        if (text[i + 1] === '"') {
          field += '"';
          i += 2;
          continue;
        }
        inQuotes = false;
        i += 1;
        continue;
      }
      field += ch;
      i += 1;
      continue;
    }
    if (ch === '"') {
      inQuotes = true;
      i += 1;
    } else if (ch === ",") {
      pushField();
      i += 1;
    } else if (ch === "\r") {
      i += 1;
    } else if (ch === "\n") {
      pushRow();
      i += 1;
    } else {
      field += ch;
      i += 1;
    }
  }
  if (field.length > 0 || row.length > 0) pushRow();
  if (rows.length === 0) throw new Error("empty CSV input");
  const [header, ...data] = rows;
  return { header, rows: data.filter((r) => r.length > 1 || r[0] !== "") };
}

export function readCsv(path: string): Table {
  return parseCsv(readFileSync(path, "utf-8"));
}

/** Column accessor; throws on schema mismatch. */
export function column(table: Table, name: string): string[] {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new Error(
      `missing column "${name}" (have: ${table.header.join(", ")})`,
    );
  }
  return table.rows.map((r) => r[idx] ?? "");
}

export function numericColumn(table: Table, name: string): number[] {
  return column(table, name).map((s, i) => {
    const v = Number(s);
    if (!Number.isFinite(v)) {
      throw new Error(`non-numeric value "${s}" in column "${name}" row ${i}`);
    }
    return v;
  });
}
