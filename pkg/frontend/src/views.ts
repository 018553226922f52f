import { boxSvg, caseCurveSvg, maxDailyQ75, testsBarSvg } from "./charts.js";
import { escapeHtml, formatNumber, intervalLabel } from "./format.js";
import { PolicyReportPayload, Strategy, StrategyReport } from "./types.js";

export interface ScenarioInput {
  sigma: number;
  interval_days: number;
}

export const BASELINE: ScenarioInput = { sigma: 0.4, interval_days: 14 };

export function strategyLabel(s: ScenarioInput): string {
  return `${Math.round(s.sigma * 100)}% tested ${intervalLabel(s.interval_days)}`;
}

export function toStrategy(s: ScenarioInput): Strategy {
  return { sigma: s.sigma, interval_days: s.interval_days, label: strategyLabel(s) };
}

/** The scenario composer: sliders/selects bounded to valid ranges. */
export function scenarioFormHtml(scenarios: ScenarioInput[]): string {
  const rows = scenarios
    .map(
      (s, i) => `
    <tr data-index="${i}">
      <td>${i + 1}</td>
      <td><input type="range" class="sigma" min="0" max="1" step="0.05" value="${s.sigma}">
          <span class="sigma-value">${Math.round(s.sigma * 100)}%</span></td>
      <td><select class="interval">
            <option value="14"${s.interval_days === 14 ? " selected" : ""}>every 14 days</option>
            <option value="7"${s.interval_days === 7 ? " selected" : ""}>weekly</option>
            <option value="3.5"${s.interval_days === 3.5 ? " selected" : ""}>twice weekly</option>
          </select></td>
      <td><button class="remove" title="remove scenario">&times;</button></td>
    </tr>`,
    )
    .join("");
  return `
  <table class="builder">
    <thead><tr><th></th><th>Proportion tested</th><th>Testing frequency</th><th></th></tr></thead>
    <tbody>${rows}</tbody>
  </table>
  <div class="builder-actions">
    <button id="add-scenario">Add scenario</button>
    <button id="add-baseline">Add fall baseline (40%, every 14 days)</button>
    <button id="add-default-grid">Load full 3&times;3 grid</button>
    <label>draws per scenario <input id="n-draws" type="number" min="1" value="200"></label>
    <label>seed <input id="seed" type="number" value="0"></label>
    <button id="submit-sweep" class="primary">Run sweep</button>
  </div>
  <div id="form-errors" class="errors"></div>`;
}

function quantileCells(label: string, q: { q05: number; q25: number; q50: number; q75: number; q95: number }, domainMax: number): string {
  return `
    <div class="metric">
      <span class="metric-label">${label}</span>
      ${boxSvg(q, domainMax)}
      <span class="metric-numbers">
        median <b data-field="${label}" class="num">${formatNumber(q.q50)}</b>
        <span class="iqr-text">[${formatNumber(q.q25)}, ${formatNumber(q.q75)}]</span>
      </span>
    </div>`;
}

/** One completed scenario: headline numbers plus box summaries and curve. */
export function scenarioCardHtml(report: StrategyReport, context: {
  casesMax: number;
  quarMax: number;
  testsMax: number;
  curveMax: number;
}): string {
  return `
  <article class="card done" data-label="${escapeHtml(report.label)}">
    <h3>${escapeHtml(report.label)}</h3>
    <div class="headline">
      <div><span class="num" data-field="cases">${formatNumber(report.cumulative_cases.q50)}</span>
        <span class="caption">median cases</span></div>
      <div><span class="num" data-field="final-quarantine">${formatNumber(report.final_quarantine.q50)}</span>
        <span class="caption">in quarantine at end</span></div>
      <div><span class="num" data-field="tests">${formatNumber(report.tests_administered.q50)}</span>
        <span class="caption">tests used</span></div>
    </div>
    ${quantileCells("semester cases", report.cumulative_cases, context.casesMax)}
    ${quantileCells("quarantine entries", report.quarantine_entries, context.quarMax)}
    ${quantileCells("peak quarantine+isolation", report.peak_quar_iso, context.quarMax)}
    <div class="metric">
      <span class="metric-label">tests administered</span>
      ${testsBarSvg(report.tests_administered.q50, context.testsMax)}
      <span class="metric-numbers"><b class="num" data-field="tests-bar">${formatNumber(report.tests_administered.q50)}</b></span>
    </div>
    <div class="metric curve-wrap">
      <span class="metric-label">daily cases (median, 50% band)</span>
      ${caseCurveSvg(report, context.curveMax)}
    </div>
  </article>`;
}

export function placeholderCardHtml(label: string, status: string, progress: number): string {
  const pct = Math.round(progress * 100);
  return `
  <article class="card pending" data-label="${escapeHtml(label)}">
    <h3>${escapeHtml(label)}</h3>
    <p class="status">${escapeHtml(status)} &mdash; ${pct}%</p>
    <progress max="100" value="${pct}"></progress>
  </article>`;
}

/** Side-by-side comparison of every completed scenario in a sweep. */
export function comparisonViewHtml(payload: PolicyReportPayload, jobId: string): string {
  const reports = payload.strategies;
  const casesMax = Math.max(...reports.map((r) => r.cumulative_cases.q95));
  const quarMax = Math.max(
    ...reports.map((r) => Math.max(r.quarantine_entries.q95, r.peak_quar_iso.q95)),
  );
  const testsMax = Math.max(...reports.map((r) => r.tests_administered.q95));
  const curveMax = maxDailyQ75(reports);
  const cards = reports
    .map((r) => scenarioCardHtml(r, { casesMax, quarMax, testsMax, curveMax }))
    .join("");
  return `
  <section class="comparison" data-job="${escapeHtml(jobId)}">
    <h2>Sweep ${escapeHtml(jobId)} &middot; ${reports.length} scenarios</h2>
    <div class="cards grid-${reports.length === 9 ? "3" : "flow"}">${cards}</div>
  </section>`;
}

/** Every number a card displays, keyed for the byte-match check. */
export function displayedNumbers(report: StrategyReport): string[] {
  return [
    formatNumber(report.cumulative_cases.q50),
    formatNumber(report.cumulative_cases.q25),
    formatNumber(report.cumulative_cases.q75),
    formatNumber(report.quarantine_entries.q50),
    formatNumber(report.quarantine_entries.q25),
    formatNumber(report.quarantine_entries.q75),
    formatNumber(report.peak_quar_iso.q50),
    formatNumber(report.final_quarantine.q50),
    formatNumber(report.tests_administered.q50),
  ];
}
