import { QuantileSummary, StrategyReport } from "./types.js";

// Hand-rolled SVG fragments: no chart dependency, deterministic output.

function scaleFactory(min: number, max: number, lo: number, hi: number) {
  const span = max - min || 1;
  return (v: number) => lo + ((v - min) / span) * (hi - lo);
}

/** Horizontal box summary of a quantile set (q05-q95 whisker, q25-q75 box). */
export function boxSvg(q: QuantileSummary, domainMax: number, width = 260, height = 26): string {
  const x = scaleFactory(0, domainMax, 4, width - 4);
  const mid = height / 2;
  const boxTop = 4;
  const boxBottom = height - 4;
  return [
    `<svg class="box" viewBox="0 0 ${width} ${height}" width="${width}" height="${height}">`,
    `<line x1="${x(q.q05)}" y1="${mid}" x2="${x(q.q95)}" y2="${mid}" class="whisker"/>`,
    `<rect x="${x(q.q25)}" y="${boxTop}" width="${Math.max(1, x(q.q75) - x(q.q25))}" ` +
      `height="${boxBottom - boxTop}" class="iqr"/>`,
    `<line x1="${x(q.q50)}" y1="${boxTop}" x2="${x(q.q50)}" y2="${boxBottom}" class="median"/>`,
    `</svg>`,
  ].join("");
}

/** Bar of total tests administered (median), shared scale across strategies. */
export function testsBarSvg(value: number, domainMax: number, width = 260, height = 14): string {
  const w = Math.max(1, (value / (domainMax || 1)) * (width - 8));
  return [
    `<svg class="bar" viewBox="0 0 ${width} ${height}" width="${width}" height="${height}">`,
    `<rect x="4" y="2" width="${w}" height="${height - 4}" class="tests"/>`,
    `</svg>`,
  ].join("");
}

function pathFrom(points: Array<[number, number]>): string {
  return points
    .map(([px, py], i) => `${i === 0 ? "M" : "L"}${px.toFixed(2)},${py.toFixed(2)}`)
    .join(" ");
}

/**
 * Median daily-case curve with its interquartile band.
 * Band and median share the y-scale so the ordering band_lo <= median <=
 * band_hi is visually verifiable.
 */
export function caseCurveSvg(report: StrategyReport, yMax: number, width = 280, height = 120): string {
  const n = report.daily_cases_median.length;
  const x = scaleFactory(0, Math.max(1, n - 1), 6, width - 6);
  const y = scaleFactory(0, yMax || 1, height - 8, 8);
  const upper = report.daily_cases_q75.map((v, i) => [x(i), y(v)] as [number, number]);
  const lower = report.daily_cases_q25.map((v, i) => [x(i), y(v)] as [number, number]);
  const band = `${pathFrom(upper)} ${pathFrom(lower.reverse()).replace(/^M/, "L")} Z`;
  const median = pathFrom(report.daily_cases_median.map((v, i) => [x(i), y(v)]));
  return [
    `<svg class="curve" viewBox="0 0 ${width} ${height}" width="${width}" height="${height}">`,
    `<path d="${band}" class="band"/>`,
    `<path d="${median}" class="median-line" fill="none"/>`,
    `</svg>`,
  ].join("");
}

export function maxDailyQ75(reports: StrategyReport[]): number {
  let max = 0;
  for (const r of reports) {
    for (const v of r.daily_cases_q75) {
      if (v > max) max = v;
    }
  }
  return max;
}
