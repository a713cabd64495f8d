/**
 * Turns query results plus relationship exports into a renderable graph
 * view. Nodes are the distinct entities appearing in the result table;
 * an edge is shown only when both endpoints are displayed.
 */

export interface NodeCellDto {
  label: string;
  key: string[];
  props: Record<string, unknown>;
}

export interface ResultTableDto {
  columns: string[];
  rows: unknown[][];
  row_count?: number;
  truncated?: boolean;
}

export interface RelRow {
  src: string;
  dst: string;
  [prop: string]: unknown;
}

export interface GraphNodeView {
  id: string;
  label: string;
  keyString: string;
  props: Record<string, unknown>;
}

export interface GraphEdgeView {
  type: string;
  source: string;
  target: string;
}

export interface GraphView {
  nodes: GraphNodeView[];
  edges: GraphEdgeView[];
}

// One distinct color per label.
export const LABEL_COLORS: Record<string, string> = {
  Vulnerability: "#e15759",
  Exploit: "#f28e2b",
  Weakness: "#af7aa1",
  Product: "#4e79a7",
  Vendor: "#59a14f",
  Author: "#edc948",
  Domain: "#76b7b2",
};

// src label and candidate dst labels per relationship type (the export
// rows carry bare keys, so the type disambiguates the endpoint labels).
export const EDGE_ENDPOINTS: Record<string, { src: string; dst: string[] }> = {
  EXPLOITS: { src: "Exploit", dst: ["Vulnerability"] },
  AFFECTS: { src: "Vulnerability", dst: ["Product"] },
  BELONGS_TO: { src: "Product", dst: ["Vendor"] },
  EXAMPLE_OF: { src: "Vulnerability", dst: ["Weakness"] },
  WRITES: { src: "Author", dst: ["Exploit", "Vulnerability"] },
  REFERS_TO: { src: "Vulnerability", dst: ["Domain"] },
};

export function isNodeCell(cell: unknown): cell is NodeCellDto {
  return (
    typeof cell === "object" &&
    cell !== null &&
    "label" in cell &&
    "key" in cell &&
    Array.isArray((cell as NodeCellDto).key)
  );
}

/** Canonical key string; Product keys are vendor-qualified. */
export function keyString(label: string, key: string[]): string {
  return label === "Product" ? `${key[1]}/${key[0]}` : key[0];
}

export function nodeId(label: string, key: string[]): string {
  return `${label}:${keyString(label, key)}`;
}

export function distinctEntities(table: ResultTableDto): GraphNodeView[] {
  const seen = new Map<string, GraphNodeView>();
  for (const row of table.rows) {
    for (const cell of row) {
      if (!isNodeCell(cell)) continue;
      const id = nodeId(cell.label, cell.key);
      if (!seen.has(id)) {
        seen.set(id, {
          id,
          label: cell.label,
          keyString: keyString(cell.label, cell.key),
          props: cell.props ?? {},
        });
      }
    }
  }
  return [...seen.values()];
}

export function buildGraphView(
  table: ResultTableDto,
  relsByType: Record<string, RelRow[]>,
): GraphView {
  const nodes = distinctEntities(table);
  const ids = new Set(nodes.map((n) => n.id));
  const edges: GraphEdgeView[] = [];
  const dedup = new Set<string>();

  for (const [type, rows] of Object.entries(relsByType)) {
    const endpoints = EDGE_ENDPOINTS[type];
    if (!endpoints) continue;
    for (const row of rows) {
      const source = `${endpoints.src}:${row.src}`;
      if (!ids.has(source)) continue;
      const target = endpoints.dst
        .map((label) => `${label}:${row.dst}`)
        .find((candidate) => ids.has(candidate));
      if (!target) continue;
      const fingerprint = `${type}|${source}|${target}`;
      if (!dedup.has(fingerprint)) {
        dedup.add(fingerprint);
        edges.push({ type, source, target });
      }
    }
  }
  return { nodes, edges };
}

/** Neighbor ids of a node (plus itself), for selection highlighting. */
export function neighborhood(view: GraphView, id: string): Set<string> {
  const near = new Set([id]);
  for (const edge of view.edges) {
    if (edge.source === id) near.add(edge.target);
    if (edge.target === id) near.add(edge.source);
  }
  return near;
}
