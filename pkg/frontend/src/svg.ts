/**
 * Minimal deterministic SVG chart primitives: linear/log scales, axes with
 * tick labels, polylines, scatter points, bars and a legend.  Output bytes
 * depend only on the input data, so rerendering identical inputs yields an
 * identical file.
 */

export interface Scale {
  (value: number): number;
  ticks(): number[];
}

export const WIDTH = 640;
export const HEIGHT = 420;
export const MARGIN = { left: 64, right: 16, top: 28, bottom: 44 };

export const PALETTE = [
  "#1f77b4", "#d62728", "#2ca02c", "#9467bd",
  "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

/** Fixed-format number: enough digits to be faithful, no trailing noise. */
export function fmt(value: number): string {
  if (!Number.isFinite(value)) return String(value);
  const s = value.toPrecision(6);
  return String(Number(s));
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  let [d0, d1] = domain;
  if (d0 === d1) {
    d0 -= 0.5;
    d1 += 0.5;
  }
  const scale = ((value: number) =>
    range[0] + ((value - d0) / (d1 - d0)) * (range[1] - range[0])) as Scale;
  scale.ticks = () => linearTicks(d0, d1);
  return scale;
}

export function logScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  if (d0 <= 0 || d1 <= 0) {
    throw new Error(`log scale needs a positive domain, got [${d0}, ${d1}]`);
  }
  const l0 = Math.log10(d0);
  const l1 = Math.log10(d1 === d0 ? d0 * 10 : d1);
  const scale = ((value: number) =>
    range[0] + ((Math.log10(value) - l0) / (l1 - l0)) * (range[1] - range[0])) as Scale;
  scale.ticks = () => {
    const ticks: number[] = [];
    for (let e = Math.ceil(l0); e <= Math.floor(l1); e++) ticks.push(10 ** e);
    return ticks.length >= 2 ? ticks : [d0, d1];
  };
  return scale;
}

function linearTicks(lo: number, hi: number, count = 6): number[] {
  const span = hi - lo;
  const step = 10 ** Math.floor(Math.log10(span / count));
  const candidates = [step, 2 * step, 5 * step, 10 * step];
  const chosen = candidates.find((s) => span / s <= count) ?? 10 * step;
  const ticks: number[] = [];
  for (let t = Math.ceil(lo / chosen) * chosen; t <= hi + 1e-12 * span; t += chosen) {
    ticks.push(Math.abs(t) < 1e-12 * span ? 0 : t);
  }
  return ticks;
}

export class SvgChart {
  private parts: string[] = [];

  constructor(
    readonly x: Scale,
    readonly y: Scale,
    title: string,
    xLabel: string,
    yLabel: string,
  ) {
    this.parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
        `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif" font-size="12">`,
      `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
      `<text x="${WIDTH / 2}" y="18" text-anchor="middle" font-size="14">${escapeXml(title)}</text>`,
    );
    this.axes(xLabel, yLabel);
  }

  private axes(xLabel: string, yLabel: string): void {
    const { left, top, bottom } = MARGIN;
    const x0 = left;
    const x1 = WIDTH - MARGIN.right;
    const y0 = HEIGHT - bottom;
    const y1 = top;
    this.parts.push(
      `<line x1="${x0}" y1="${y0}" x2="${x1}" y2="${y0}" stroke="black"/>`,
      `<line x1="${x0}" y1="${y0}" x2="${x0}" y2="${y1}" stroke="black"/>`,
    );
    for (const t of this.x.ticks()) {
      const px = fmt(this.x(t));
      this.parts.push(
        `<line x1="${px}" y1="${y0}" x2="${px}" y2="${y0 + 5}" stroke="black"/>`,
        `<text x="${px}" y="${y0 + 18}" text-anchor="middle">${fmt(t)}</text>`,
      );
    }
    for (const t of this.y.ticks()) {
      const py = fmt(this.y(t));
      this.parts.push(
        `<line x1="${x0 - 5}" y1="${py}" x2="${x0}" y2="${py}" stroke="black"/>`,
        `<text x="${x0 - 8}" y="${py}" text-anchor="end" dominant-baseline="middle">${fmt(t)}</text>`,
      );
    }
    this.parts.push(
      `<text x="${(x0 + x1) / 2}" y="${HEIGHT - 8}" text-anchor="middle">${escapeXml(xLabel)}</text>`,
      `<text x="16" y="${(y0 + y1) / 2}" text-anchor="middle" ` +
        `transform="rotate(-90 16 ${(y0 + y1) / 2})">${escapeXml(yLabel)}</text>`,
    );
  }

  polyline(xs: number[], ys: number[], color: string): void {
    const points = xs
      .map((x, i) => `${fmt(this.x(x))},${fmt(this.y(ys[i]!))}`)
      .join(" ");
    this.parts.push(
      `<polyline points="${points}" fill="none" stroke="${color}" stroke-width="1.5"/>`,
    );
  }

  scatter(xs: number[], ys: number[], color: string): void {
    for (let i = 0; i < xs.length; i++) {
      this.parts.push(
        `<circle cx="${fmt(this.x(xs[i]!))}" cy="${fmt(this.y(ys[i]!))}" r="3" ` +
          `fill="${color}" fill-opacity="0.75"/>`,
      );
    }
  }

  bar(xLo: number, xHi: number, height: number, color: string): void {
    const px0 = this.x(xLo);
    const px1 = this.x(xHi);
    const py = this.y(height);
    const base = this.y(0);
    this.parts.push(
      `<rect x="${fmt(px0)}" y="${fmt(py)}" width="${fmt(px1 - px0)}" ` +
        `height="${fmt(base - py)}" fill="${color}" fill-opacity="0.55" stroke="white" stroke-width="0.5"/>`,
    );
  }

  legend(labels: string[]): void {
    const x = WIDTH - MARGIN.right - 130;
    labels.forEach((label, i) => {
      const y = MARGIN.top + 8 + 18 * i;
      this.parts.push(
        `<rect x="${x}" y="${y - 9}" width="12" height="12" fill="${PALETTE[i % PALETTE.length]}"/>`,
        `<text x="${x + 18}" y="${y + 1}" dominant-baseline="middle">${escapeXml(label)}</text>`,
      );
    });
  }

  toString(): string {
    return this.parts.join("\n") + "\n</svg>\n";
  }
}

export function plotArea(): { x: [number, number]; y: [number, number] } {
  return {
    x: [MARGIN.left, WIDTH - MARGIN.right],
    y: [HEIGHT - MARGIN.bottom, MARGIN.top],
  };
}

function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
