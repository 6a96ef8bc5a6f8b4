import * as fs from "fs";

export interface Table {
  path: string;
  columns: string[];
  rows: Record<string, string>[];
}

/** Parse a simple comma-separated file with a header row (no quoting). */
export function readCsv(path: string): Table {
  const text = fs.readFileSync(path, "utf8");
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new Error(`empty CSV file: ${path}`);
  }
  const columns = lines[0].split(",");
  const rows = lines.slice(1).map((line, i) => {
    const cells = line.split(",");
    if (cells.length !== columns.length) {
      throw new Error(`${path}:${i + 2}: expected ${columns.length} cells, got ${cells.length}`);
    }
    const row: Record<string, string> = {};
    columns.forEach((name, j) => (row[name] = cells[j]));
    return row;
  });
  return { path, columns, rows };
}

export function requireColumns(table: Table, names: string[]): void {
  for (const name of names) {
    if (!table.columns.includes(name)) {
      throw new Error(`missing column '${name}' in ${table.path}`);
    }
  }
}

export function toNumber(table: Table, row: Record<string, string>, column: string): number {
  const value = Number(row[column]);
  if (!Number.isFinite(value)) {
    throw new Error(`non-numeric value '${row[column]}' in column '${column}' of ${table.path}`);
  }
  return value;
}
