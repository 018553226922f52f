import { Strategy } from "./types.js";

// Client-side mirror of the server's Strategy validation: invalid input is
// blocked before it ever reaches the API.
export function validateStrategy(s: Strategy): string[] {
  const problems: string[] = [];
  if (!Number.isFinite(s.sigma) || s.sigma < 0 || s.sigma > 1) {
    problems.push("proportion tested must be between 0 and 1");
  }
  if (!Number.isFinite(s.interval_days) || s.interval_days < 1) {
    problems.push("testing interval must be at least 1 day");
  }
  return problems;
}

export function validateSweepRequest(strategies: Strategy[], nPerStrategy: number): string[] {
  const problems: string[] = [];
  if (strategies.length === 0) {
    problems.push("add at least one scenario");
  }
  strategies.forEach((s, i) => {
    for (const problem of validateStrategy(s)) {
      problems.push(`scenario ${i + 1}: ${problem}`);
    }
  });
  if (!Number.isInteger(nPerStrategy) || nPerStrategy < 1) {
    problems.push("draws per scenario must be a positive integer");
  }
  return problems;
}
