import { JobRecord, PolicyReportPayload, Strategy } from "./types.js";

// Same-origin by default (the API serves the dashboard); override for dev.
export let apiBase = "";

export function setApiBase(base: string): void {
  apiBase = base.replace(/\/$/, "");
}

async function getJson<T>(path: string): Promise<T> {
  const response = await fetch(`${apiBase}${path}`);
  if (!response.ok) {
    throw new Error(`GET ${path} failed: ${response.status}`);
  }
  return (await response.json()) as T;
}

async function postJson<T>(path: string, body: unknown): Promise<T> {
  const response = await fetch(`${apiBase}${path}`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
  });
  if (!response.ok) {
    const detail = await response.text();
    throw new Error(`POST ${path} failed: ${response.status} ${detail}`);
  }
  return (await response.json()) as T;
}

export function fetchDefaultStrategies(): Promise<{ strategies: Strategy[] }> {
  return getJson("/api/strategies/default");
}

export function submitSweep(
  strategies: Strategy[],
  nPerStrategy: number,
  seed: number,
  posteriorId = "default",
): Promise<{ job_id: string }> {
  return postJson("/api/sweep", {
    strategies,
    n_per_strategy: nPerStrategy,
    seed,
    posterior_id: posteriorId,
  });
}

export function fetchJob(jobId: string): Promise<JobRecord> {
  return getJson(`/api/jobs/${jobId}`);
}

export async function fetchResultText(jobId: string): Promise<string> {
  const response = await fetch(`${apiBase}/api/jobs/${jobId}/result`);
  if (!response.ok) {
    throw new Error(`result ${jobId} failed: ${response.status}`);
  }
  return response.text();
}

export async function fetchPolicyReport(jobId: string): Promise<PolicyReportPayload> {
  return JSON.parse(await fetchResultText(jobId)) as PolicyReportPayload;
}

export async function pollUntilDone(
  jobId: string,
  onProgress: (record: JobRecord) => void,
  intervalMs = 500,
  timeoutMs = 10 * 60 * 1000,
): Promise<JobRecord> {
  const deadline = Date.now() + timeoutMs;
  for (;;) {
    const record = await fetchJob(jobId);
    onProgress(record);
    if (record.status === "done" || record.status === "failed") {
      return record;
    }
    if (Date.now() > deadline) {
      throw new Error(`job ${jobId} timed out`);
    }
    await new Promise((resolve) => setTimeout(resolve, intervalMs));
  }
}
