/** Minimal CSV reader for the experiment output schemas (no quoting:
 * the emitter writes plain numeric fields). */

export class MissingColumnError extends Error {
  constructor(public readonly column: string, file: string) {
    super(`missing column '${column}' in ${file}`);
  }
}

export interface Table {
  columns: string[];
  rows: number[][];
}

export function parseCsv(text: string): Table {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new Error("empty CSV");
  }
  const columns = lines[0].split(",");
  const rows = lines.slice(1).map((line) => line.split(",").map(Number));
  return { columns, rows };
}

/** Extract named columns, erroring with the first missing column name. */
export function requireColumns(table: Table, names: string[], file = "input"): number[][] {
  const idx = names.map((name) => {
    const i = table.columns.indexOf(name);
    if (i < 0) throw new MissingColumnError(name, file);
    return i;
  });
  return names.map((_, j) => table.rows.map((row) => row[idx[j]]));
}
