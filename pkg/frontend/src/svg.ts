/** Deterministic SVG plotting primitives (no runtime dependencies).
 *
 * Numbers are formatted with fixed precision so identical inputs always
 * produce byte-identical files.
 */

export const WIDTH = 640;
export const HEIGHT = 440;
export const MARGIN = { left: 70, right: 20, top: 36, bottom: 48 };

export type Scale = (v: number) => number;

export function fmt(v: number): string {
  if (!Number.isFinite(v)) return "0";
  return v.toFixed(2);
}

export function linearScale(
  lo: number,
  hi: number,
  outLo: number,
  outHi: number,
): Scale {
  const span = hi - lo || 1;
  return (v) => outLo + ((v - lo) / span) * (outHi - outLo);
}

export function logScale(
  lo: number,
  hi: number,
  outLo: number,
  outHi: number,
): Scale {
  const llo = Math.log10(lo);
  const span = Math.log10(hi) - llo || 1;
  return (v) => outLo + ((Math.log10(v) - llo) / span) * (outHi - outLo);
}

export function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!Number.isFinite(lo)) return [0, 1];
  if (lo === hi) return [lo - 1, hi + 1];
  return [lo, hi];
}

export function niceTicks(lo: number, hi: number, count = 6): number[] {
  const span = hi - lo;
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const err = span / count / step;
  const mult = err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1;
  const s = step * mult;
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / s) * s; v <= hi + 1e-12 * span; v += s) {
    ticks.push(Math.abs(v) < 1e-12 * span ? 0 : v);
  }
  return ticks;
}

export function tickLabel(v: number): string {
  if (v === 0) return "0";
  const mag = Math.abs(v);
  if (mag >= 1e4 || mag < 1e-3) return v.toExponential(1);
  return String(Math.round(v * 1e6) / 1e6);
}

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                 "#17becf"];

export class Figure {
  parts: string[] = [];

  constructor(
    public title: string,
    public xlabel: string,
    public ylabel: string,
  ) {}

  axes(xs: Scale, ys: Scale, xticks: number[], yticks: number[],
       xlog = false): void {
    const { left, right, top, bottom } = MARGIN;
    const x0 = left;
    const x1 = WIDTH - right;
    const y0 = HEIGHT - bottom;
    const y1 = top;
    this.parts.push(
      `<rect x="${x0}" y="${y1}" width="${x1 - x0}" height="${y0 - y1}" fill="none" stroke="#333" stroke-width="1"/>`,
    );
    for (const t of xticks) {
      const px = fmt(xs(t));
      this.parts.push(
        `<line x1="${px}" y1="${y0}" x2="${px}" y2="${y0 + 5}" stroke="#333"/>`,
        `<text x="${px}" y="${y0 + 20}" text-anchor="middle" font-size="11">${
          xlog ? `1e${Math.round(Math.log10(t))}` : tickLabel(t)}</text>`,
      );
    }
    for (const t of yticks) {
      const py = fmt(ys(t));
      this.parts.push(
        `<line x1="${x0 - 5}" y1="${py}" x2="${x0}" y2="${py}" stroke="#333"/>`,
        `<text x="${x0 - 8}" y="${py}" text-anchor="end" dominant-baseline="middle" font-size="11">${tickLabel(t)}</text>`,
      );
    }
    this.parts.push(
      `<text x="${(x0 + x1) / 2}" y="${HEIGHT - 12}" text-anchor="middle" font-size="13">${this.xlabel}</text>`,
      `<text x="16" y="${(y0 + y1) / 2}" text-anchor="middle" font-size="13" transform="rotate(-90 16 ${(y0 + y1) / 2})">${this.ylabel}</text>`,
      `<text x="${(x0 + x1) / 2}" y="22" text-anchor="middle" font-size="14" font-weight="bold">${this.title}</text>`,
    );
  }

  polyline(xs: number[], ys: number[], series = 0, dashed = false): void {
    const pts = xs.map((x, i) => `${fmt(x)},${fmt(ys[i])}`).join(" ");
    const dash = dashed ? ' stroke-dasharray="6 4"' : "";
    this.parts.push(
      `<polyline points="${pts}" fill="none" stroke="${PALETTE[series % PALETTE.length]}" stroke-width="1.8"${dash}/>`,
    );
  }

  markers(xs: number[], ys: number[], series = 0): void {
    for (let i = 0; i < xs.length; i++) {
      this.parts.push(
        `<circle cx="${fmt(xs[i])}" cy="${fmt(ys[i])}" r="3" fill="${PALETTE[series % PALETTE.length]}"/>`,
      );
    }
  }

  legend(entries: string[]): void {
    const x = WIDTH - MARGIN.right - 150;
    let y = MARGIN.top + 14;
    for (let i = 0; i < entries.length; i++) {
      this.parts.push(
        `<line x1="${x}" y1="${y - 4}" x2="${x + 24}" y2="${y - 4}" stroke="${PALETTE[i % PALETTE.length]}" stroke-width="2"/>`,
        `<text x="${x + 30}" y="${y}" font-size="11">${entries[i]}</text>`,
      );
      y += 16;
    }
  }

  raw(svg: string): void {
    this.parts.push(svg);
  }

  render(): string {
    return [
      `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
      `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
      ...this.parts,
      "</svg>",
      "",
    ].join("\n");
  }
}

/** Blue-white-red diverging colour for heat maps, deterministic. */
export function divergingColor(t: number): string {
  const clamp = (v: number) => Math.max(0, Math.min(1, v));
  const s = clamp(t);
  const r = Math.round(255 * (s < 0.5 ? 2 * s : 1));
  const b = Math.round(255 * (s > 0.5 ? 2 * (1 - s) : 1));
  const g = Math.round(255 * (1 - Math.abs(2 * s - 1)));
  return `rgb(${r},${g},${b})`;
}
