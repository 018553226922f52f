// Displayed numbers are the canonical string form of the server's JSON
// values: what the API sent is what the administrator reads.
export function formatNumber(value: number): string {
  return String(value);
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function intervalLabel(days: number): string {
  if (days === 14) return "every 14 days";
  if (days === 7) return "weekly";
  if (days === 3.5) return "twice weekly";
  return `every ${String(days)} days`;
}
