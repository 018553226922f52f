// Mirrors of the server's JSON wire formats.

export interface Strategy {
  sigma: number;
  interval_days: number;
  label: string;
}

export interface QuantileSummary {
  q05: number;
  q25: number;
  q50: number;
  q75: number;
  q95: number;
}

export interface StrategyReport {
  label: string;
  sigma: number;
  interval_days: number;
  n_draws: number;
  cumulative_cases: QuantileSummary;
  quarantine_entries: QuantileSummary;
  final_quarantine: QuantileSummary;
  peak_quar_iso: QuantileSummary;
  tests_administered: QuantileSummary;
  daily_cases_median: number[];
  daily_cases_q25: number[];
  daily_cases_q75: number[];
}

export interface PolicyReportPayload {
  strategies: StrategyReport[];
}

export interface JobRecord {
  id: string;
  kind: string;
  status: "queued" | "running" | "done" | "failed";
  progress: number;
  result_location: string | null;
  error: string | null;
}
