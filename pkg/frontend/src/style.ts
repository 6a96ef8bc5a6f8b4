/** Fixed per-combiner colors/markers; line style encodes the power policy
 * (solid = full power, dash-dot = max-min), with matching markers. */

export const COMBINER_ORDER = [
  "mr",
  "zf",
  "rzf",
  "mmse",
  "local-mr",
  "local-zf",
  "local-rzf",
  "local-mmse",
];

export const COLORS: Record<string, string> = {
  mr: "#d62728",
  zf: "#1f77b4",
  rzf: "#2ca02c",
  mmse: "#9467bd",
  "local-mr": "#ff7f0e",
  "local-zf": "#8c564b",
  "local-rzf": "#17becf",
  "local-mmse": "#e377c2",
};

export type MarkerShape = "circle" | "square" | "triangle" | "diamond" | "cross" | "plus" | "star" | "tridown";

export const MARKERS: Record<string, MarkerShape> = {
  mr: "circle",
  zf: "square",
  rzf: "triangle",
  mmse: "diamond",
  "local-mr": "cross",
  "local-zf": "plus",
  "local-rzf": "tridown",
  "local-mmse": "star",
};

export const LABELS: Record<string, string> = {
  mr: "MR",
  zf: "ZF",
  rzf: "RZF",
  mmse: "MMSE",
  "local-mr": "LSFD",
  "local-zf": "Local ZF",
  "local-rzf": "Local RZF",
  "local-mmse": "Local MMSE",
};

export const DASH_BY_POLICY: Record<string, string | undefined> = {
  full: undefined,
  maxmin: "9 3 2 3",
};

export function colorOf(combiner: string): string {
  return COLORS[combiner] ?? "#444444";
}

export function markerOf(combiner: string): MarkerShape {
  return MARKERS[combiner] ?? "circle";
}

export function labelOf(combiner: string, policy?: string): string {
  const base = LABELS[combiner] ?? combiner;
  if (policy === undefined || policy === "full") return base;
  return `${base} (max-min)`;
}

export function seriesSortKey(combiner: string, policy: string): number {
  const c = COMBINER_ORDER.indexOf(combiner);
  const rank = c === -1 ? COMBINER_ORDER.length : c;
  return rank * 2 + (policy === "maxmin" ? 1 : 0);
}
