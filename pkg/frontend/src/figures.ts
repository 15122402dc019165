/** The five figure kinds rendered from solver outputs. */

import { readFileSync } from "node:fs";

import { column, parseCsv, Table } from "./csv.js";
import { parseVtk, vtkField } from "./vtk.js";
import {
  divergingColor,
  extent,
  Figure,
  HEIGHT,
  linearScale,
  logScale,
  MARGIN,
  niceTicks,
  WIDTH,
} from "./svg.js";

export interface FigureSpec {
  kind: "profile" | "dispersion" | "convergence" | "contour" | "seismogram";
  name: string;
  input?: string;
  inputs?: string[];
  overlay?: string;
  x?: string;
  y?: string | string[];
  field?: string;
  title?: string;
}

function loadTable(path: string): Table {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch (e) {
    throw new Error(`cannot read input '${path}': ${(e as Error).message}`);
  }
  return parseCsv(text, path);
}

function plotArea() {
  return {
    x0: MARGIN.left,
    x1: WIDTH - MARGIN.right,
    y0: HEIGHT - MARGIN.bottom,
    y1: MARGIN.top,
  };
}

/** Numerical profile along a cut, optionally overlaid with a reference. */
export function renderProfile(spec: FigureSpec): string {
  if (!spec.input) throw new Error(`figure ${spec.name}: missing input`);
  const table = loadTable(spec.input);
  const xName = spec.x ?? table.columns[0];
  const yNames = Array.isArray(spec.y) ? spec.y : [spec.y ?? table.columns[1]];
  const xs = column(table, xName, spec.input);
  const area = plotArea();
  const allY: number[] = [];
  const series: { label: string; x: number[]; y: number[]; dashed: boolean }[] = [];
  for (const name of yNames) {
    const ys = column(table, name, spec.input);
    allY.push(...ys);
    series.push({ label: name, x: xs, y: ys, dashed: false });
  }
  if (spec.overlay) {
    const ref = loadTable(spec.overlay);
    const rx = column(ref, spec.x ?? ref.columns[0], spec.overlay);
    const ry = column(ref, Array.isArray(spec.y) ? spec.y[0] : spec.y ?? ref.columns[1], spec.overlay);
    allY.push(...ry);
    series.push({ label: "reference", x: rx, y: ry, dashed: true });
  }
  const [xlo, xhi] = extent(xs);
  const [ylo, yhi] = extent(allY);
  const pad = 0.05 * (yhi - ylo);
  const sx = linearScale(xlo, xhi, area.x0, area.x1);
  const sy = linearScale(ylo - pad, yhi + pad, area.y0, area.y1);
  const fig = new Figure(spec.title ?? spec.name, xName, yNames.join(", "));
  fig.axes(sx, sy, niceTicks(xlo, xhi), niceTicks(ylo - pad, yhi + pad));
  series.forEach((s, i) =>
    fig.polyline(s.x.map(sx), s.y.map(sy), i, s.dashed));
  fig.legend(series.map((s) => s.label));
  return fig.render();
}

/** Phase-velocity branches against log angular frequency. */
export function renderDispersion(spec: FigureSpec): string {
  if (!spec.input) throw new Error(`figure ${spec.name}: missing input`);
  const table = loadTable(spec.input);
  const omega = column(table, "omega", spec.input);
  const branches = ["V_long", "V_shear", "V_heat"].filter((c) =>
    table.data.has(c));
  const area = plotArea();
  const [xlo, xhi] = extent(omega);
  const allV = branches.flatMap((b) => column(table, b, spec.input!));
  const [vlo, vhi] = extent(allV);
  const pad = 0.06 * (vhi - vlo);
  const sx = logScale(xlo, xhi, area.x0, area.x1);
  const sy = linearScale(Math.max(vlo - pad, 0), vhi + pad, area.y0, area.y1);
  const fig = new Figure(spec.title ?? "phase velocity", "omega [rad/s]",
                         "V [m/s]");
  const decades: number[] = [];
  for (let d = Math.ceil(Math.log10(xlo)); d <= Math.floor(Math.log10(xhi));
       d += 2) {
    decades.push(Math.pow(10, d));
  }
  fig.axes(sx, sy, decades, niceTicks(Math.max(vlo - pad, 0), vhi + pad),
           true);
  branches.forEach((b, i) => {
    const v = column(table, b, spec.input!);
    fig.polyline(omega.map(sx), v.map(sy), i);
  });
  fig.legend(branches);
  return fig.render();
}

/** Error-vs-grid log-log chart with observed order annotations. */
export function renderConvergence(spec: FigureSpec): string {
  if (!spec.input) throw new Error(`figure ${spec.name}: missing input`);
  const table = loadTable(spec.input);
  const ns = column(table, table.columns[0], spec.input);
  const norms = table.columns.slice(1);
  const area = plotArea();
  const allE = norms.flatMap((c) => column(table, c, spec.input!));
  const sx = logScale(extent(ns)[0], extent(ns)[1], area.x0, area.x1);
  const [elo, ehi] = extent(allE);
  const sy = logScale(elo, ehi, area.y0, area.y1);
  const fig = new Figure(spec.title ?? "convergence", "grid cells per side",
                         "error");
  const eticks: number[] = [];
  for (let d = Math.ceil(Math.log10(elo)); d <= Math.floor(Math.log10(ehi));
       d++) {
    eticks.push(Math.pow(10, d));
  }
  fig.axes(sx, sy, ns, eticks, false);
  norms.forEach((c, i) => {
    const e = column(table, c, spec.input!);
    fig.polyline(ns.map(sx), e.map(sy), i);
    fig.markers(ns.map(sx), e.map(sy), i);
  });
  const L = column(table, norms[0], spec.input);
  const order = Math.log(L[L.length - 2] / L[L.length - 1]) /
    Math.log(ns[ns.length - 1] / ns[ns.length - 2]);
  fig.raw(
    `<text x="${MARGIN.left + 12}" y="${MARGIN.top + 18}" font-size="12">observed order ~ ${order.toFixed(2)}</text>`,
  );
  fig.legend(norms);
  return fig.render();
}

/** Cell-wise heat map of one scalar field from a VTK file. */
export function renderContour(spec: FigureSpec): string {
  if (!spec.input) throw new Error(`figure ${spec.name}: missing input`);
  if (!spec.field) throw new Error(`figure ${spec.name}: missing field`);
  let text: string;
  try {
    text = readFileSync(spec.input, "utf8");
  } catch (e) {
    throw new Error(`cannot read input '${spec.input}': ${(e as Error).message}`);
  }
  const grid = parseVtk(text, spec.input);
  const vals = vtkField(grid, spec.field, spec.input);
  const area = plotArea();
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of vals) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (lo === hi) {
    hi = lo + 1;
  }
  const fig = new Figure(spec.title ?? `${spec.field}`, "x", "y");
  const cw = (area.x1 - area.x0) / grid.nx;
  const ch = (area.y0 - area.y1) / grid.ny;
  for (let j = 0; j < grid.ny; j++) {
    for (let i = 0; i < grid.nx; i++) {
      const v = vals[j * grid.nx + i];
      const t = (v - lo) / (hi - lo);
      const px = area.x0 + i * cw;
      const py = area.y0 - (j + 1) * ch;
      fig.raw(
        `<rect x="${px.toFixed(2)}" y="${py.toFixed(2)}" width="${(cw + 0.5).toFixed(2)}" height="${(ch + 0.5).toFixed(2)}" fill="${divergingColor(t)}"/>`,
      );
    }
  }
  const xlo = grid.originX;
  const xhi = grid.originX + grid.dx * (grid.nx - 1);
  const ylo = grid.originY;
  const yhi = grid.originY + grid.dy * (grid.ny - 1);
  const sx = linearScale(xlo, xhi, area.x0, area.x1);
  const sy = linearScale(ylo, yhi, area.y0, area.y1);
  fig.axes(sx, sy, niceTicks(xlo, xhi), niceTicks(ylo, yhi));
  fig.raw(
    `<text x="${WIDTH - MARGIN.right - 4}" y="${MARGIN.top - 8}" text-anchor="end" font-size="11">range [${lo.toExponential(2)}, ${hi.toExponential(2)}]</text>`,
  );
  return fig.render();
}

/** Time signals at a receiver, one line per input file. */
export function renderSeismogram(spec: FigureSpec): string {
  const inputs = spec.inputs ?? (spec.input ? [spec.input] : []);
  if (inputs.length === 0) {
    throw new Error(`figure ${spec.name}: needs at least one input`);
  }
  const area = plotArea();
  const series = inputs.map((p) => {
    const tab = loadTable(p);
    return {
      label: p.replace(/^.*\//, ""),
      t: column(tab, spec.x ?? "t", p),
      v: column(tab, (Array.isArray(spec.y) ? spec.y[0] : spec.y) ?? "v", p),
    };
  });
  const [tlo, thi] = extent(series.flatMap((s) => s.t));
  const [vlo, vhi] = extent(series.flatMap((s) => s.v));
  const pad = 0.06 * (vhi - vlo);
  const sx = linearScale(tlo, thi, area.x0, area.x1);
  const sy = linearScale(vlo - pad, vhi + pad, area.y0, area.y1);
  const fig = new Figure(spec.title ?? "receiver signal", "t [s]", "v");
  fig.axes(sx, sy, niceTicks(tlo, thi), niceTicks(vlo - pad, vhi + pad));
  series.forEach((s, i) =>
    fig.polyline(s.t.map(sx), s.v.map(sy), i, i > 0));
  fig.legend(series.map((s) => s.label));
  return fig.render();
}

export function renderFigure(spec: FigureSpec): string {
  switch (spec.kind) {
    case "profile":
      return renderProfile(spec);
    case "dispersion":
      return renderDispersion(spec);
    case "convergence":
      return renderConvergence(spec);
    case "contour":
      return renderContour(spec);
    case "seismogram":
      return renderSeismogram(spec);
    default:
      throw new Error(`unknown figure kind '${(spec as FigureSpec).kind}'`);
  }
}
