/** Client-side export of the current node selection to CSV or JSON. */

import type { GraphNodeView } from "./graphModel";

export type ExportFormat = "csv" | "json";

function csvCell(value: unknown): string {
  if (value === null || value === undefined) return "";
  const text = Array.isArray(value) ? value.join(";") : String(value);
  return /[",\n]/.test(text) ? `"${text.replace(/"/g, '""')}"` : text;
}

export function selectionToCsv(nodes: GraphNodeView[], props: string[]): string {
  const lines = [props.join(",")];
  for (const node of nodes) {
    lines.push(props.map((p) => csvCell(node.props[p])).join(","));
  }
  return lines.join("\n") + "\n";
}

export function selectionToJson(nodes: GraphNodeView[], props: string[]): string {
  const rows = nodes.map((node) =>
    Object.fromEntries(props.map((p) => [p, node.props[p] ?? null])),
  );
  return JSON.stringify(rows, null, 2);
}

export function exportSelection(
  nodes: GraphNodeView[],
  props: string[],
  format: ExportFormat,
): string {
  if (!nodes.length) throw new Error("nothing selected");
  if (!props.length) throw new Error("choose at least one property");
  return format === "csv" ? selectionToCsv(nodes, props) : selectionToJson(nodes, props);
}

export function exportEnabled(selection: ReadonlySet<string>): boolean {
  return selection.size > 0;
}

/** Browser-only: stream text to the user as a file download. */
export function triggerDownload(filename: string, text: string, mime: string): void {
  const url = URL.createObjectURL(new Blob([text], { type: mime }));
  const anchor = document.createElement("a");
  anchor.href = url;
  anchor.download = filename;
  anchor.style.display = "none";
  document.body.appendChild(anchor);
  anchor.click();
  document.body.removeChild(anchor);
  setTimeout(() => URL.revokeObjectURL(url), 1000);
}
