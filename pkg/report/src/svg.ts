/**
 * Minimal deterministic SVG scene builder.
 *
 * Figures must be reproducible byte for byte, so everything that reaches
 * the output goes through one number formatter (fixed precision, trailing
 * zeros trimmed) and no fonts are embedded: text uses a generic monospace
 * family with explicit sizes, and nothing depends on locale or clock.
 */

export const WIDTH = 640;
export const HEIGHT = 420;
export const MARGIN = { left: 64, right: 16, top: 28, bottom: 46 };

export function fmt(v: number): string {
  if (!Number.isFinite(v)) {
    throw new Error(`non-finite coordinate ${v}`);
  }
  if (v === 0) return "0";
  const s = v.toPrecision(8);
  return s.includes(".") ? s.replace(/\.?0+$/, "").replace(/\.?0+e/, "e") : s;
}

export interface Scale {
  (v: number): number;
  ticks: number[];
  toLabel(v: number): string;
}

function niceTicks(lo: number, hi: number, count: number): number[] {
  const span = hi - lo;
  const step0 = span / Math.max(count, 1);
  const mag = Math.pow(10, Math.floor(Math.log10(step0)));
  let step = mag;
  for (const m of [1, 2, 5, 10]) {
    if (step0 <= m * mag) {
      step = m * mag;
      break;
    }
  }
  const start = Math.ceil(lo / step) * step;
  const out: number[] = [];
  for (let v = start; v <= hi + 1e-12 * span; v += step) {
    out.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return out;
}

export function linearScale(
  lo: number,
  hi: number,
  outLo: number,
  outHi: number,
): Scale {
  if (hi <= lo) {
    hi = lo + 1;
  }
  const fn = ((v: number) =>
    outLo + ((v - lo) / (hi - lo)) * (outHi - outLo)) as Scale;
  fn.ticks = niceTicks(lo, hi, 6);
  fn.toLabel = (v: number) => fmt(Number(v.toPrecision(6)));
  return fn;
}

export function log10Scale(
  lo: number,
  hi: number,
  outLo: number,
  outHi: number,
): Scale {
  if (lo <= 0 || hi <= 0) {
    throw new Error("log scale needs positive bounds");
  }
  const la = Math.log10(lo);
  const lb = Math.log10(hi);
  const fn = ((v: number) =>
    outLo + ((Math.log10(v) - la) / (lb - la || 1)) * (outHi - outLo)) as Scale;
  const ticks: number[] = [];
  for (let e = Math.ceil(la - 1e-9); e <= Math.floor(lb + 1e-9); e++) {
    ticks.push(Math.pow(10, e));
  }
  fn.ticks = ticks.length >= 2 ? ticks : [lo, hi];
  fn.toLabel = (v: number) => fmt(Number(v.toPrecision(6)));
  return fn;
}

export class Svg {
  private parts: string[] = [];

  constructor(title: string) {
    this.parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
      `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
      `<text x="${WIDTH / 2}" y="18" font-family="monospace" font-size="13" text-anchor="middle">${escapeXml(title)}</text>`,
    );
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke: string, width = 1, dash = ""): void {
    const d = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(
      `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" stroke="${stroke}" stroke-width="${width}"${d}/>`,
    );
  }

  circle(x: number, y: number, r: number, fill: string): void {
    this.parts.push(`<circle cx="${fmt(x)}" cy="${fmt(y)}" r="${r}" fill="${fill}"/>`);
  }

  path(points: Array<[number, number]>, stroke: string, width = 1.5, dash = ""): void {
    const d = points
      .map(([x, y], i) => `${i === 0 ? "M" : "L"}${fmt(x)} ${fmt(y)}`)
      .join(" ");
    const dd = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(
      `<path d="${d}" fill="none" stroke="${stroke}" stroke-width="${width}"${dd}/>`,
    );
  }

  text(x: number, y: number, content: string, size = 11, anchor = "start", fill = "black"): void {
    this.parts.push(
      `<text x="${fmt(x)}" y="${fmt(y)}" font-family="monospace" font-size="${size}" text-anchor="${anchor}" fill="${fill}">${escapeXml(content)}</text>`,
    );
  }

  axes(xs: Scale, ys: Scale, xlabel: string, ylabel: string): void {
    const x0 = MARGIN.left;
    const x1 = WIDTH - MARGIN.right;
    const y0 = HEIGHT - MARGIN.bottom;
    const y1 = MARGIN.top;
    this.line(x0, y0, x1, y0, "black");
    this.line(x0, y0, x0, y1, "black");
    for (const t of xs.ticks) {
      const px = xs(t);
      if (px < x0 - 1e-6 || px > x1 + 1e-6) continue;
      this.line(px, y0, px, y0 + 4, "black");
      this.text(px, y0 + 16, xs.toLabel(t), 10, "middle");
    }
    for (const t of ys.ticks) {
      const py = ys(t);
      if (py > y0 + 1e-6 || py < y1 - 1e-6) continue;
      this.line(x0 - 4, py, x0, py, "black");
      this.text(x0 - 6, py + 3, ys.toLabel(t), 10, "end");
    }
    this.text((x0 + x1) / 2, HEIGHT - 10, xlabel, 11, "middle");
    this.parts.push(
      `<text x="14" y="${(y0 + y1) / 2}" font-family="monospace" font-size="11" text-anchor="middle" transform="rotate(-90 14 ${(y0 + y1) / 2})">${escapeXml(ylabel)}</text>`,
    );
  }

  errorBar(x: number, y: number, half: number, stroke: string): void {
    this.line(x, y - half, x, y + half, stroke);
    this.line(x - 3, y - half, x + 3, y - half, stroke);
    this.line(x - 3, y + half, x + 3, y + half, stroke);
  }

  render(): string {
    return this.parts.join("\n") + "\n</svg>\n";
  }
}

function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
