/**
 * Figure rendering from run-output CSVs.  Each figure kind reads every file
 * matching the input glob, draws one series per file (labeled by its tau or
 * alpha value) and writes a single SVG.  Rendering never modifies its inputs
 * and identical input bytes produce an identical output file.
 */

import { writeFileSync } from "node:fs";

import { column, expandGlob, readTable, seriesLabel, Table } from "./schema.js";
import { linearScale, logScale, PALETTE, plotArea, SvgChart } from "./svg.js";

export type FigureKind =
  | "complexity_vs_u"
  | "bn_scatter"
  | "ipr_vs_tau"
  | "b1_vs_tau"
  | "bn_ratio_hist";

export interface FigureSpec {
  inputGlob: string;
  figureKind: FigureKind;
  outputPath: string;
  /** histogram bin count override; default is the Freedman-Diaconis rule */
  bins?: number;
}

interface Series {
  label: string;
  order: number;
  table: Table;
}

/** Render the figure and return the SVG markup that was written. */
export function render(spec: FigureSpec): string {
  const paths = expandGlob(spec.inputGlob);
  if (paths.length === 0) {
    throw new Error(`no input files match ${spec.inputGlob}`);
  }
  const svg = build(spec, paths);
  writeFileSync(spec.outputPath, svg);
  return svg;
}

function build(spec: FigureSpec, paths: string[]): string {
  switch (spec.figureKind) {
    case "complexity_vs_u":
      return lineFigure(loadSeries(paths, ["u", "C"]), "u", "C",
        "Spread complexity vs u", "C(u)");
    case "bn_scatter":
      return bnScatter(loadSeries(paths, ["n", "a_n", "b_n"]));
    case "ipr_vs_tau":
      return lineFigure(loadSeries(paths, ["tau", "ipr"]), "tau", "ipr",
        "IPR vs tau", "IPR");
    case "b1_vs_tau":
      return lineFigure(loadSeries(paths, ["tau", "b1"]), "tau", "b1",
        "First Lanczos coefficient vs tau", "b1");
    case "bn_ratio_hist":
      return ratioHistogram(loadSeries(paths, ["n", "a_n", "b_n"]), spec.bins);
  }
}

function loadSeries(paths: string[], required: string[]): Series[] {
  const series = paths.map((path) => {
    const { name, value } = seriesLabel(path);
    return { label: `${name}=${value}`, order: value, table: readTable(path, required) };
  });
  series.sort((a, b) => a.order - b.order);
  return series;
}

function lineFigure(
  series: Series[],
  xColumn: string,
  yColumn: string,
  title: string,
  yLabel: string,
): string {
  const allX = series.flatMap((s) => column(s.table, xColumn));
  const allY = series.flatMap((s) => column(s.table, yColumn));
  const area = plotArea();
  const x = linearScale(extent(allX), area.x);
  const yMin = Math.min(...allY);
  const yMax = Math.max(...allY);
  // spread over many decades reads as a flat line on a linear axis
  const useLog = yMin > 0 && yMax / yMin > 1e3;
  const y = useLog
    ? logScale([yMin, yMax], area.y)
    : linearScale([Math.min(0, yMin), yMax], area.y);
  const chart = new SvgChart(x, y, title, xColumn, yLabel);
  series.forEach((s, i) => {
    chart.polyline(column(s.table, xColumn), column(s.table, yColumn),
      PALETTE[i % PALETTE.length]!);
  });
  chart.legend(series.map((s) => s.label));
  return chart.toString();
}

function bnScatter(series: Series[]): string {
  // row n = 0 is the a_0 row and carries the b_n = 0 placeholder
  const points = series.map((s) => {
    const n = column(s.table, "n");
    const b = column(s.table, "b_n");
    const xs: number[] = [];
    const ys: number[] = [];
    for (let i = 0; i < n.length; i++) {
      if (n[i]! >= 1) {
        xs.push(n[i]!);
        ys.push(b[i]!);
      }
    }
    return { xs, ys };
  });
  const area = plotArea();
  const x = linearScale(extent(points.flatMap((p) => p.xs)), area.x);
  const y = linearScale([0, Math.max(...points.flatMap((p) => p.ys))], area.y);
  const chart = new SvgChart(x, y, "Lanczos coefficients", "n", "b_n");
  points.forEach((p, i) => chart.scatter(p.xs, p.ys, PALETTE[i % PALETTE.length]!));
  chart.legend(series.map((s) => s.label));
  return chart.toString();
}

function ratioHistogram(series: Series[], binsOverride?: number): string {
  const values = series.map((s) => {
    const n = column(s.table, "n");
    const b = column(s.table, "b_n");
    const out: number[] = [];
    for (let i = 0; i + 1 < n.length; i++) {
      if (n[i]! >= 1 && b[i]! > 0 && b[i + 1]! > 0) {
        out.push(Math.log(b[i]! / b[i + 1]!));
      }
    }
    return out;
  });
  const pooled = values.flat();
  if (pooled.length === 0) {
    throw new Error("no b_n ratios available for the histogram");
  }
  const [lo, hi] = extent(pooled);
  const bins = binsOverride ?? freedmanDiaconisBins(pooled);
  const width = (hi - lo) / bins || 1;
  const counts = values.map((vals) => {
    const c = new Array<number>(bins).fill(0);
    for (const v of vals) {
      const k = Math.min(bins - 1, Math.floor((v - lo) / width));
      c[k]!++;
    }
    return c;
  });
  const area = plotArea();
  const x = linearScale([lo, lo + bins * width], area.x);
  const y = linearScale([0, Math.max(...counts.flat())], area.y);
  const chart = new SvgChart(x, y, "Histogram of log(b_n / b_n+1)",
    "log(b_n / b_n+1)", "count");
  counts.forEach((c, si) => {
    // side-by-side sub-bars so overlapping series stay readable
    const sub = width / counts.length;
    for (let k = 0; k < bins; k++) {
      if (c[k]! > 0) {
        chart.bar(lo + k * width + si * sub, lo + k * width + (si + 1) * sub,
          c[k]!, PALETTE[si % PALETTE.length]!);
      }
    }
  });
  chart.legend(series.map((s) => s.label));
  return chart.toString();
}

export function freedmanDiaconisBins(values: number[]): number {
  const sorted = [...values].sort((a, b) => a - b);
  const [lo, hi] = [sorted[0]!, sorted[sorted.length - 1]!];
  const iqr = quantile(sorted, 0.75) - quantile(sorted, 0.25);
  const binWidth = (2 * iqr) / Math.cbrt(sorted.length);
  if (binWidth <= 0 || hi === lo) {
    return Math.max(1, Math.ceil(Math.sqrt(sorted.length)));
  }
  return Math.max(1, Math.ceil((hi - lo) / binWidth));
}

function quantile(sorted: number[], q: number): number {
  const pos = (sorted.length - 1) * q;
  const base = Math.floor(pos);
  const rest = pos - base;
  const next = sorted[Math.min(base + 1, sorted.length - 1)]!;
  return sorted[base]! + rest * (next - sorted[base]!);
}

function extent(values: number[]): [number, number] {
  return [Math.min(...values), Math.max(...values)];
}
