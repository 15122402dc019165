/** Minimal reader for the solver's numeric CSV outputs.
 *
 * Files carry an optional leading `#` comment line, then a header row,
 * then purely numeric rows.
 */

export interface Table {
  columns: string[];
  /** column name -> values */
  data: Map<string, number[]>;
  comment: string | null;
}

export function parseCsv(text: string, path = "<string>"): Table {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  let comment: string | null = null;
  let start = 0;
  if (lines.length > 0 && lines[0].startsWith("#")) {
    comment = lines[0].slice(1).trim();
    start = 1;
  }
  if (lines.length <= start) {
    throw new Error(`${path}: no header row`);
  }
  const columns = lines[start].split(",").map((c) => c.trim());
  const data = new Map<string, number[]>(columns.map((c) => [c, []]));
  for (let i = start + 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== columns.length) {
      throw new Error(
        `${path}:${i + 1}: expected ${columns.length} fields, got ${parts.length}`,
      );
    }
    for (let j = 0; j < columns.length; j++) {
      const v = Number(parts[j]);
      if (!Number.isFinite(v)) {
        throw new Error(`${path}:${i + 1}: non-numeric value '${parts[j]}'`);
      }
      data.get(columns[j])!.push(v);
    }
  }
  return { columns, data, comment };
}

export function column(table: Table, name: string, path = "<table>"): number[] {
  const col = table.data.get(name);
  if (col === undefined) {
    throw new Error(
      `${path}: missing column '${name}' (have: ${table.columns.join(", ")})`,
    );
  }
  return col;
}
