/** Reader for the solver's legacy-VTK structured-points ASCII files. */

export interface VtkGrid {
  nx: number;
  ny: number;
  originX: number;
  originY: number;
  dx: number;
  dy: number;
  /** field name -> row-major [j][i] values (y-major as written) */
  fields: Map<string, Float64Array>;
}

export function parseVtk(text: string, path = "<string>"): VtkGrid {
  const lines = text.split(/\r?\n/);
  let nx = 0;
  let ny = 0;
  let originX = 0;
  let originY = 0;
  let dx = 1;
  let dy = 1;
  const fields = new Map<string, Float64Array>();
  let i = 0;
  const next = () => lines[i++] ?? "";
  if (!next().startsWith("# vtk DataFile")) {
    throw new Error(`${path}: not a legacy VTK file`);
  }
  next(); // comment
  const encoding = next().trim();
  if (encoding !== "ASCII") {
    throw new Error(`${path}: only ASCII supported, got '${encoding}'`);
  }
  if (next().trim() !== "DATASET STRUCTURED_POINTS") {
    throw new Error(`${path}: expected DATASET STRUCTURED_POINTS`);
  }
  while (i < lines.length) {
    const line = next().trim();
    if (line === "") continue;
    const parts = line.split(/\s+/);
    if (parts[0] === "DIMENSIONS") {
      nx = Number(parts[1]);
      ny = Number(parts[2]);
    } else if (parts[0] === "ORIGIN") {
      originX = Number(parts[1]);
      originY = Number(parts[2]);
    } else if (parts[0] === "SPACING") {
      dx = Number(parts[1]);
      dy = Number(parts[2]);
    } else if (parts[0] === "POINT_DATA" || parts[0] === "CELL_DATA") {
      // count implied by dimensions
    } else if (parts[0] === "SCALARS") {
      const name = parts[1];
      const lookup = next().trim();
      if (!lookup.startsWith("LOOKUP_TABLE")) {
        throw new Error(`${path}: SCALARS ${name} missing LOOKUP_TABLE`);
      }
      const n = nx * ny;
      const vals = new Float64Array(n);
      let k = 0;
      while (k < n && i < lines.length) {
        const row = next().trim();
        if (row === "") continue;
        for (const tok of row.split(/\s+/)) {
          if (k >= n) break;
          vals[k++] = Number(tok);
        }
      }
      if (k !== n) {
        throw new Error(`${path}: SCALARS ${name}: expected ${n} values, got ${k}`);
      }
      fields.set(name, vals);
    } else {
      throw new Error(`${path}: unsupported record '${parts[0]}'`);
    }
  }
  if (nx <= 0 || ny <= 0) {
    throw new Error(`${path}: missing DIMENSIONS`);
  }
  return { nx, ny, originX, originY, dx, dy, fields };
}

export function vtkField(grid: VtkGrid, name: string, path = "<vtk>"): Float64Array {
  const f = grid.fields.get(name);
  if (f === undefined) {
    throw new Error(
      `${path}: missing field '${name}' (have: ${[...grid.fields.keys()].join(", ")})`,
    );
  }
  return f;
}
