/** Display rounding and color scales; the only "math" the UI does. */

export function fmt(value: number | null | undefined, digits = 4): string {
  if (value === null || value === undefined) return "n/a";
  if (Number.isInteger(value)) return String(value);
  return value.toFixed(digits);
}

export function fmtSigned(value: number | null | undefined, digits = 4): string {
  if (value === null || value === undefined) return "n/a";
  const text = fmt(Math.abs(value), digits);
  return value > 0 ? `+${text}` : value < 0 ? `-${text}` : text;
}

/** Map a value inside [lo, hi] to a blue->white->red scale (diverging) or
 * white->blue (sequential when lo >= 0). */
export function heatColor(value: number | null, lo: number, hi: number): string {
  if (value === null || !isFinite(value)) return "#f0f0f0";
  if (hi === lo) return "hsl(210, 60%, 85%)";
  const t = Math.max(0, Math.min(1, (value - lo) / (hi - lo)));
  if (lo >= 0) {
    const light = 97 - t * 47; // white -> mid blue
    return `hsl(210, 70%, ${light.toFixed(0)}%)`;
  }
  // diverging around zero
  const mid = (0 - lo) / (hi - lo);
  if (t < mid) {
    const s = mid === 0 ? 0 : (mid - t) / mid;
    return `hsl(210, 70%, ${(97 - s * 47).toFixed(0)}%)`;
  }
  const s = mid === 1 ? 0 : (t - mid) / (1 - mid);
  return `hsl(5, 70%, ${(97 - s * 47).toFixed(0)}%)`;
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
