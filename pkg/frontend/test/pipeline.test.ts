import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { column, parseCsv } from "../src/csv.js";
import { parseVtk, vtkField } from "../src/vtk.js";
import { renderFigure } from "../src/figures.js";
import { runSpec } from "../src/main.js";

const FIX = join(__dirname, "..", "fixtures");

function fullSpec(dir: string) {
  const spec = {
    output_dir: "figs",
    figures: [
      { kind: "profile", name: "stokes", input: join(FIX, "stokes_cut.csv"),
        x: "x", y: ["v"], overlay: join(FIX, "stokes_exact.csv") },
      { kind: "dispersion", name: "dispersion",
        input: join(FIX, "dispersion.csv") },
      { kind: "convergence", name: "orders", input: join(FIX, "orders.csv") },
      { kind: "contour", name: "a12", input: join(FIX, "vortex.vtk"),
        field: "A12" },
      { kind: "seismogram", name: "seis",
        inputs: [join(FIX, "seis_hpr.csv"), join(FIX, "seis_elastic.csv")] },
    ],
  };
  const path = join(dir, "spec.json");
  writeFileSync(path, JSON.stringify(spec));
  return path;
}

describe("csv reader", () => {
  it("parses solver cut files with comment headers", () => {
    const t = parseCsv(readFileSync(join(FIX, "stokes_cut.csv"), "utf8"));
    expect(t.comment).toContain("cut along x");
    expect(t.columns[0]).toBe("x");
    expect(column(t, "v").length).toBeGreaterThan(10);
  });

  it("names missing columns", () => {
    const t = parseCsv("a,b\n1,2\n");
    expect(() => column(t, "c", "f.csv")).toThrow(/missing column 'c'/);
  });

  it("rejects ragged rows", () => {
    expect(() => parseCsv("a,b\n1\n", "f.csv")).toThrow(/expected 2 fields/);
  });
});

describe("vtk reader", () => {
  it("reads structured points written by the solver", () => {
    const g = parseVtk(readFileSync(join(FIX, "vortex.vtk"), "utf8"));
    expect(g.nx).toBe(24);
    expect(g.ny).toBe(24);
    const rho = vtkField(g, "rho");
    expect(rho.length).toBe(24 * 24);
    // the vortex core is a density trough on a unit background
    const lo = Math.min(...rho);
    expect(lo).toBeLessThan(0.6);
    expect(Math.max(...rho)).toBeLessThanOrEqual(1.01);
  });

  it("rejects binary files", () => {
    expect(() => parseVtk("# vtk DataFile Version 3.0\nx\nBINARY\n"))
      .toThrow(/only ASCII/);
  });
});

describe("figure kinds", () => {
  it("renders all five kinds", () => {
    const dir = mkdtempSync(join(tmpdir(), "hprplot-"));
    const files = runSpec(fullSpec(dir));
    expect(files.length).toBe(6); // five figures + manifest
    for (const f of files.slice(0, 5)) {
      const svg = readFileSync(f, "utf8");
      expect(svg).toContain("<svg");
      expect(svg).toContain("</svg>");
    }
  });

  it("dispersion curve is a monotone S-shape between the limits", () => {
    const table = parseCsv(readFileSync(join(FIX, "dispersion.csv"), "utf8"));
    const v = column(table, "V_long");
    for (let i = 1; i < v.length; i++) {
      expect(v[i]).toBeGreaterThanOrEqual(v[i - 1] - 1e-9);
    }
    const svg = renderFigure({
      kind: "dispersion", name: "d", input: join(FIX, "dispersion.csv"),
    });
    // the rendered polyline y-coordinates must decrease monotonically
    // (SVG y grows downward), i.e. the S-curve rises left to right
    const m = svg.match(/<polyline points="([^"]+)"/);
    expect(m).not.toBeNull();
    const ys = m![1].split(" ").map((p) => Number(p.split(",")[1]));
    for (let i = 1; i < ys.length; i++) {
      expect(ys[i]).toBeLessThanOrEqual(ys[i - 1] + 1e-6);
    }
  });

  it("errors on a missing input file", () => {
    expect(() => renderFigure({
      kind: "profile", name: "x", input: "/nonexistent.csv",
    })).toThrow(/cannot read input/);
  });

  it("errors on an empty figure list", () => {
    const dir = mkdtempSync(join(tmpdir(), "hprplot-"));
    const path = join(dir, "empty.json");
    writeFileSync(path, JSON.stringify({ figures: [] }));
    expect(() => runSpec(path)).toThrow(/no figures/);
  });
});

describe("manifest", () => {
  it("is stable across repeated runs", () => {
    const d1 = mkdtempSync(join(tmpdir(), "hprplot-"));
    const d2 = mkdtempSync(join(tmpdir(), "hprplot-"));
    runSpec(fullSpec(d1));
    runSpec(fullSpec(d2));
    const m1 = JSON.parse(readFileSync(join(d1, "figs", "manifest.json"),
                                       "utf8"));
    const m2 = JSON.parse(readFileSync(join(d2, "figs", "manifest.json"),
                                       "utf8"));
    expect(m1.outputs).toEqual(m2.outputs);
    expect(Object.keys(m1.inputs).length).toBe(7);
    expect(Object.keys(m1.outputs).length).toBe(5);
  });
});
