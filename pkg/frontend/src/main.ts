#!/usr/bin/env node
/** hpr-plot <spec-file>: render the figures described by a JSON spec.
 *
 * Spec format:
 *   {
 *     "output_dir": "figures",
 *     "figures": [
 *       {"kind": "profile", "name": "stokes", "input": "cut.csv",
 *        "x": "x", "y": ["v"], "overlay": "exact.csv"},
 *       {"kind": "dispersion", "name": "disp", "input": "dispersion.csv"},
 *       {"kind": "convergence", "name": "orders", "input": "orders.csv"},
 *       {"kind": "contour", "name": "a12", "input": "field.vtk",
 *        "field": "A12"},
 *       {"kind": "seismogram", "name": "seis",
 *        "inputs": ["hpr.csv", "elastic.csv"]}
 *     ]
 *   }
 * Inputs are resolved relative to the spec file.  Writes one SVG per figure
 * plus manifest.json with sha256 checksums of all inputs and outputs.
 */

import { mkdirSync, readFileSync, writeFileSync } from "node:fs";
import { dirname, join, resolve } from "node:path";

import { FigureSpec, renderFigure } from "./figures.js";
import { hashFile, Manifest, renderManifest, sha256 } from "./manifest.js";

interface PlotSpec {
  output_dir?: string;
  figures: FigureSpec[];
}

export function runSpec(specPath: string): string[] {
  const specText = readFileSync(specPath, "utf8");
  const spec = JSON.parse(specText) as PlotSpec;
  if (!Array.isArray(spec.figures) || spec.figures.length === 0) {
    throw new Error(`${specPath}: spec lists no figures`);
  }
  const base = dirname(resolve(specPath));
  const outDir = resolve(base, spec.output_dir ?? "figures");
  mkdirSync(outDir, { recursive: true });
  const manifest: Manifest = { inputs: {}, outputs: {} };
  const written: string[] = [];
  for (const fig of spec.figures) {
    if (!fig.name) throw new Error("every figure needs a name");
    const local: FigureSpec = { ...fig };
    const track = (p: string) => {
      const full = resolve(base, p);
      manifest.inputs[p] = hashFile(full);
      return full;
    };
    if (local.input) local.input = track(local.input);
    if (local.overlay) local.overlay = track(local.overlay);
    if (local.inputs) local.inputs = local.inputs.map(track);
    const svg = renderFigure(local);
    const outPath = join(outDir, `${fig.name}.svg`);
    writeFileSync(outPath, svg);
    manifest.outputs[`${fig.name}.svg`] = sha256(svg);
    written.push(outPath);
  }
  const manifestPath = join(outDir, "manifest.json");
  writeFileSync(manifestPath, renderManifest(manifest));
  written.push(manifestPath);
  return written;
}

export function main(argv: string[]): number {
  if (argv.length !== 1) {
    console.error("usage: hpr-plot <spec-file>");
    return 2;
  }
  try {
    const files = runSpec(argv[0]);
    console.log(`wrote ${files.length} files:`);
    for (const f of files) console.log(`  ${f}`);
    return 0;
  } catch (e) {
    console.error(`hpr-plot: ${(e as Error).message}`);
    return 1;
  }
}

const isCli = process.argv[1] !== undefined &&
  resolve(process.argv[1]).endsWith("main.js");
if (isCli) {
  process.exit(main(process.argv.slice(2)));
}
