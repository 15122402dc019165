/** Provenance manifest: sha256 of every input consumed and output written. */

import { createHash } from "node:crypto";
import { readFileSync } from "node:fs";

export interface Manifest {
  inputs: Record<string, string>;
  outputs: Record<string, string>;
}

export function sha256(data: string | Buffer): string {
  return createHash("sha256").update(data).digest("hex");
}

export function hashFile(path: string): string {
  return sha256(readFileSync(path));
}

export function renderManifest(m: Manifest): string {
  // stable key order -> stable bytes
  const sort = (o: Record<string, string>) =>
    Object.fromEntries(Object.entries(o).sort(([a], [b]) =>
      a < b ? -1 : a > b ? 1 : 0));
  return JSON.stringify(
    { inputs: sort(m.inputs), outputs: sort(m.outputs) },
    null,
    2,
  ) + "\n";
}
