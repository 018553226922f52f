import { fetchPolicyReport, pollUntilDone, submitSweep } from "./api.js";
import {
  BASELINE,
  ScenarioInput,
  comparisonViewHtml,
  placeholderCardHtml,
  scenarioFormHtml,
  toStrategy,
} from "./views.js";
import { validateSweepRequest } from "./validate.js";

const scenarios: ScenarioInput[] = [{ ...BASELINE }];
const trackedJobs: string[] = [];

const builderEl = () => document.getElementById("builder")!;
const resultsEl = () => document.getElementById("results")!;
const jobsEl = () => document.getElementById("jobs")!;

function defaultGrid(): ScenarioInput[] {
  const out: ScenarioInput[] = [];
  for (const sigma of [0.4, 0.6, 0.8]) {
    for (const interval of [14, 7, 3.5]) {
      out.push({ sigma, interval_days: interval });
    }
  }
  return out;
}

function renderBuilder(): void {
  builderEl().innerHTML = scenarioFormHtml(scenarios);

  builderEl().querySelectorAll<HTMLInputElement>("input.sigma").forEach((input) => {
    input.addEventListener("input", () => {
      const row = input.closest("tr")!;
      const index = Number(row.dataset.index);
      scenarios[index].sigma = Number(input.value);
      row.querySelector(".sigma-value")!.textContent =
        `${Math.round(scenarios[index].sigma * 100)}%`;
    });
  });
  builderEl().querySelectorAll<HTMLSelectElement>("select.interval").forEach((select) => {
    select.addEventListener("change", () => {
      const index = Number(select.closest("tr")!.dataset.index);
      scenarios[index].interval_days = Number(select.value);
    });
  });
  builderEl().querySelectorAll<HTMLButtonElement>("button.remove").forEach((button) => {
    button.addEventListener("click", () => {
      const index = Number(button.closest("tr")!.dataset.index);
      scenarios.splice(index, 1);
      renderBuilder();
    });
  });
  document.getElementById("add-scenario")!.addEventListener("click", () => {
    scenarios.push({ ...BASELINE });
    renderBuilder();
  });
  document.getElementById("add-baseline")!.addEventListener("click", () => {
    scenarios.push({ ...BASELINE });
    renderBuilder();
  });
  document.getElementById("add-default-grid")!.addEventListener("click", () => {
    scenarios.splice(0, scenarios.length, ...defaultGrid());
    renderBuilder();
  });
  document.getElementById("submit-sweep")!.addEventListener("click", () => {
    void submit();
  });
}

function showErrors(problems: string[]): void {
  document.getElementById("form-errors")!.innerHTML = problems
    .map((p) => `<p class="error">${p}</p>`)
    .join("");
}

async function submit(): Promise<void> {
  const nDraws = Number((document.getElementById("n-draws") as HTMLInputElement).value);
  const seed = Number((document.getElementById("seed") as HTMLInputElement).value);
  const strategies = scenarios.map(toStrategy);
  const problems = validateSweepRequest(strategies, nDraws);
  if (problems.length > 0) {
    showErrors(problems);
    return;
  }
  showErrors([]);
  try {
    const { job_id } = await submitSweep(strategies, nDraws, seed);
    trackedJobs.push(job_id);
    jobsEl().innerHTML = trackedJobs.map((j) => `<code>${j}</code>`).join(" ");
    const labels = strategies.map((s) => s.label).join(", ");
    const section = document.createElement("section");
    section.id = `pending-${job_id}`;
    section.innerHTML = placeholderCardHtml(labels, "queued", 0);
    resultsEl().prepend(section);

    const record = await pollUntilDone(job_id, (r) => {
      section.innerHTML = placeholderCardHtml(labels, r.status, r.progress);
    });
    if (record.status === "failed") {
      section.innerHTML = `<p class="error">sweep ${job_id} failed: ${record.error ?? "unknown"}</p>
        <button onclick="this.parentElement.remove()">dismiss</button>`;
      return;
    }
    const payload = await fetchPolicyReport(job_id);
    section.innerHTML = comparisonViewHtml(payload, job_id);
  } catch (err) {
    showErrors([`request failed: ${String(err)}. Retry once the API is reachable.`]);
  }
}

renderBuilder();
