// Stable color assignment for labels and codes: sorted names cycle a
// fixed palette, so colors never depend on point order or fetch order.

const PALETTE = [
  "#1f77b4", "#aec7e8", "#ff7f0e", "#ffbb78", "#2ca02c",
  "#98df8a", "#d62728", "#ff9896", "#9467bd", "#c5b0d5",
  "#8c564b", "#c49c94", "#e377c2", "#f7b6d2", "#7f7f7f",
  "#c7c7c7", "#bcbd22", "#dbdb8d", "#17becf", "#9edae5",
];

export const UNCODED_COLOR = "#c7c7c7";

export function colorMap(names: Iterable<string>): Map<string, string> {
  const sorted = [...new Set(names)].sort();
  const map = new Map<string, string>();
  sorted.forEach((name, i) => map.set(name, PALETTE[i % PALETTE.length]));
  return map;
}
