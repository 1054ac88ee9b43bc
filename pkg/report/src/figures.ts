/**
 * Figure kinds: each consumes documented CSV schemas and never recomputes
 * statistics; the only arithmetic here is coordinate mapping.
 */

import {
  readHydrostatics,
  readProfiles,
  readSpectrum,
  readTvDecay,
  SchemaError,
} from "./csv.js";
import {
  HEIGHT,
  linearScale,
  log10Scale,
  MARGIN,
  Svg,
  WIDTH,
  fmt,
} from "./svg.js";

const PLOT_X0 = MARGIN.left;
const PLOT_X1 = WIDTH - MARGIN.right;
const PLOT_Y0 = HEIGHT - MARGIN.bottom;
const PLOT_Y1 = MARGIN.top;

/** Empirical mode variances with error bars over the theory curve. */
export function spectrumFigure(csvPath: string): string {
  const data = readSpectrum(csvPath);
  const k = data.ksq.map(Math.sqrt);
  const lo = Math.min(...data.variance.map((v, i) => v - 3 * data.stderr[i]), ...data.lambda);
  const hi = Math.max(...data.variance.map((v, i) => v + 3 * data.stderr[i]), ...data.lambda);
  const pad = 0.1 * (hi - lo || 1);
  const xs = linearScale(0, Math.max(...k) + 0.5, PLOT_X0, PLOT_X1);
  const ys = linearScale(lo - pad, hi + pad, PLOT_Y0, PLOT_Y1);

  const fig = new Svg("stationary fluctuation spectrum: Var X(k) vs theory");
  fig.axes(xs, ys, "|k|", "mode variance");

  const order = [...k.keys()].sort((a, b) => k[a] - k[b]);
  fig.path(
    order.map((i) => [xs(k[i]), ys(data.lambda[i])]),
    "#1f77b4",
    2,
  );
  for (const i of order) {
    fig.errorBar(xs(k[i]), ys(data.variance[i]), Math.abs(ys(data.stderr[i]) - ys(0)), "#555555");
    fig.circle(xs(k[i]), ys(data.variance[i]), 2.5, "#d62728");
  }
  fig.text(PLOT_X1 - 6, PLOT_Y1 + 12, "theory λ_k", 11, "end", "#1f77b4");
  fig.text(PLOT_X1 - 6, PLOT_Y1 + 26, "empirical ± SE", 11, "end", "#d62728");
  return fig.render();
}

/** Log-log scaling points with the fitted slope annotated. */
export function hydrostaticsFigure(csvPath: string): string {
  const data = readHydrostatics(csvPath);
  const xs = log10Scale(
    Math.min(...data.n) / 1.3,
    Math.max(...data.n) * 1.3,
    PLOT_X0,
    PLOT_X1,
  );
  const ys = log10Scale(
    Math.min(...data.msq) / 1.6,
    Math.max(...data.msq) * 1.6,
    PLOT_Y0,
    PLOT_Y1,
  );
  const fig = new Svg("hydrostatic scaling: E[(mean centered density)^2] vs n");
  fig.axes(xs, ys, "n (log)", "mean square (log)");

  // fitted power law from the CSV's own fit columns
  const nGrid = [Math.min(...data.n), Math.max(...data.n)];
  fig.path(
    nGrid.map((n) => [
      xs(n),
      ys(Math.exp(data.intercept + data.slope * Math.log(n))),
    ]),
    "#1f77b4",
    2,
    "6 3",
  );
  for (let i = 0; i < data.n.length; i++) {
    fig.circle(xs(data.n[i]), ys(data.msq[i]), 3, "#d62728");
    const up = data.msq[i] + data.stderr[i];
    const dn = Math.max(data.msq[i] - data.stderr[i], data.msq[i] / 10);
    fig.line(xs(data.n[i]), ys(dn), xs(data.n[i]), ys(up), "#555555");
  }
  fig.text(
    PLOT_X0 + 10,
    PLOT_Y1 + 14,
    `fit slope = ${fmt(Number(data.slope.toPrecision(4)))}`,
    12,
    "start",
    "#1f77b4",
  );
  return fig.render();
}

/** Total-variation decay with bias floors. */
export function tvDecayFigure(csvPath: string): string {
  const data = readTvDecay(csvPath);
  const xs = log10Scale(
    Math.min(...data.n) / 1.3,
    Math.max(...data.n) * 1.3,
    PLOT_X0,
    PLOT_X1,
  );
  const top = Math.max(...data.tv.map((t, i) => t + 2 * data.stderr[i]), ...data.floor);
  const ys = linearScale(0, top * 1.15, PLOT_Y0, PLOT_Y1);
  const fig = new Svg("box-marginal total variation vs torus size");
  fig.axes(xs, ys, "n (log)", "plug-in TV");
  for (let i = 0; i < data.n.length; i++) {
    fig.errorBar(xs(data.n[i]), ys(data.tv[i]), Math.abs(ys(data.stderr[i]) - ys(0)), "#555555");
    fig.circle(xs(data.n[i]), ys(data.tv[i]), 3, "#d62728");
    fig.line(
      xs(data.n[i]) - 8,
      ys(data.floor[i]),
      xs(data.n[i]) + 8,
      ys(data.floor[i]),
      "#1f77b4",
      2,
      "2 2",
    );
  }
  fig.text(PLOT_X1 - 6, PLOT_Y1 + 12, "estimate ± SE", 11, "end", "#d62728");
  fig.text(PLOT_X1 - 6, PLOT_Y1 + 26, "plug-in bias floor", 11, "end", "#1f77b4");
  return fig.render();
}

/** Overlaid deterministic density profiles at the recorded times. */
export function profilesFigure(csvPath: string): string {
  const data = readProfiles(csvPath);
  const M = data.profiles[0].length;
  const flat = data.profiles.flat();
  const lo = Math.min(...flat);
  const hi = Math.max(...flat);
  const pad = 0.1 * (hi - lo || 1);
  const xs = linearScale(0, 1, PLOT_X0, PLOT_X1);
  const ys = linearScale(lo - pad, hi + pad, PLOT_Y0, PLOT_Y1);
  const fig = new Svg("density profiles of the limit equation");
  fig.axes(xs, ys, "x", "density");
  const palette = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#8c564b"];
  data.profiles.forEach((prof, row) => {
    const color = palette[row % palette.length];
    const pts: Array<[number, number]> = prof.map((u, j) => [xs(j / M), ys(u)]);
    pts.push([xs(1), ys(prof[0])]); // periodic closure
    fig.path(pts, color, 1.5);
    fig.text(PLOT_X1 - 6, PLOT_Y1 + 12 + 14 * row, `t = ${fmt(data.times[row])}`, 11, "end", color);
  });
  return fig.render();
}

export const FIGURES: Record<string, (path: string) => string> = {
  spectrum: spectrumFigure,
  hydrostatics: hydrostaticsFigure,
  "tv-decay": tvDecayFigure,
  "hydro-profiles": profilesFigure,
};

export function render(kind: string, csvPath: string): string {
  const fn = FIGURES[kind];
  if (!fn) {
    throw new SchemaError(
      `unknown figure kind '${kind}' (have: ${Object.keys(FIGURES).join(", ")})`,
    );
  }
  return fn(csvPath);
}
