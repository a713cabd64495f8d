import { describe, expect, it } from "vitest";

import {
  buildGraphView,
  distinctEntities,
  isNodeCell,
  keyString,
  LABEL_COLORS,
  neighborhood,
  NodeCellDto,
  ResultTableDto,
} from "../src/graphModel";
import response from "./fixtures/eternalblue_response.json";
import relationships from "./fixtures/relationships.json";

const table = response as unknown as ResultTableDto;

function independentEntityCount(t: ResultTableDto): number {
  // count distinct (label, key) pairs straight off the wire format
  const seen = new Set<string>();
  for (const row of t.rows) {
    for (const cell of row) {
      if (isNodeCell(cell)) seen.add(JSON.stringify([cell.label, cell.key]));
    }
  }
  return seen.size;
}

describe("graph view from the case-study response", () => {
  it("renders one node per distinct entity in the result", () => {
    const view = buildGraphView(table, relationships);
    expect(view.nodes.length).toBe(independentEntityCount(table));
    // 1 CVE + 3 products + 1 vendor + 2 domains + 1 weakness + 4 exploits + 2 authors
    expect(view.nodes.length).toBe(14);
  });

  it("covers all seven entity classes", () => {
    const view = buildGraphView(table, relationships);
    const labels = new Set(view.nodes.map((n) => n.label));
    expect(labels).toEqual(new Set([
      "Vulnerability", "Exploit", "Weakness", "Product",
      "Vendor", "Author", "Domain",
    ]));
  });

  it("only draws edges whose endpoints are displayed", () => {
    const view = buildGraphView(table, relationships);
    const ids = new Set(view.nodes.map((n) => n.id));
    expect(view.edges.length).toBeGreaterThan(0);
    for (const edge of view.edges) {
      expect(ids.has(edge.source)).toBe(true);
      expect(ids.has(edge.target)).toBe(true);
    }
  });

  it("drops edges whose endpoints are not part of the result", () => {
    const partial: ResultTableDto = { columns: ["v"], rows: [[table.rows[0][0]]] };
    const view = buildGraphView(partial, relationships);
    expect(view.nodes.length).toBe(1);
    expect(view.edges.length).toBe(0);
  });

  it("assigns distinct colors per label", () => {
    const colors = Object.values(LABEL_COLORS);
    expect(new Set(colors).size).toBe(colors.length);
    expect(Object.keys(LABEL_COLORS).length).toBe(7);
  });

  it("vendor-qualifies product keys", () => {
    expect(keyString("Product", ["windows_7", "microsoft"])).toBe("microsoft/windows_7");
    expect(keyString("Vulnerability", ["CVE-2017-0144"])).toBe("CVE-2017-0144");
  });

  it("selection neighborhood follows displayed edges", () => {
    const view = buildGraphView(table, relationships);
    const cve = view.nodes.find((n) => n.label === "Vulnerability")!;
    const near = neighborhood(view, cve.id);
    // every exploit targets the CVE, so they are all neighbors
    for (const node of view.nodes.filter((n) => n.label === "Exploit")) {
      expect(near.has(node.id)).toBe(true);
    }
  });

  it("property panel data survives the node cell round trip", () => {
    const cell = table.rows[0][0] as NodeCellDto;
    const entities = distinctEntities(table);
    const node = entities.find((n) => n.label === cell.label)!;
    expect(node.props.description).toBeTruthy();
  });
});
