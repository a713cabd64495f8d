import { describe, expect, it } from "vitest";

import { exportEnabled, exportSelection, selectionToCsv, selectionToJson } from "../src/export";
import { buildGraphView, ResultTableDto } from "../src/graphModel";
import response from "./fixtures/eternalblue_response.json";
import relationships from "./fixtures/relationships.json";

const view = buildGraphView(response as unknown as ResultTableDto, relationships);

describe("selection export", () => {
  it("csv has a header plus one row per node", () => {
    const nodes = view.nodes.filter((n) => n.label === "Exploit").slice(0, 3);
    const csv = selectionToCsv(nodes, ["exploitID"]);
    const lines = csv.trim().split("\n");
    expect(lines[0]).toBe("exploitID");
    expect(lines.length).toBe(4);
  });

  it("json export re-parses to the same count", () => {
    const nodes = view.nodes.filter((n) => n.label === "Exploit").slice(0, 3);
    const parsed = JSON.parse(selectionToJson(nodes, ["exploitID", "exploitType"]));
    expect(parsed.length).toBe(3);
    expect(parsed[0]).toHaveProperty("exploitID");
  });

  it("exporting the whole selection round-trips the node count", () => {
    const parsed = JSON.parse(
      exportSelection(view.nodes, ["description"], "json"));
    expect(parsed.length).toBe(view.nodes.length);
  });

  it("missing properties serialize as empty / null", () => {
    const vendor = view.nodes.find((n) => n.label === "Vendor")!;
    expect(selectionToCsv([vendor], ["cveID"]).split("\n")[1]).toBe("");
    expect(JSON.parse(selectionToJson([vendor], ["cveID"]))[0].cveID).toBeNull();
  });

  it("csv escapes quotes and commas", () => {
    const node = { ...view.nodes[0], props: { title: 'a "quoted", thing' } };
    const csv = selectionToCsv([node], ["title"]);
    expect(csv).toContain('"a ""quoted"", thing"');
  });

  it("empty selection keeps the button disabled and export throws", () => {
    expect(exportEnabled(new Set())).toBe(false);
    expect(exportEnabled(new Set(["x"]))).toBe(true);
    expect(() => exportSelection([], ["cveID"], "csv")).toThrow(/nothing selected/);
  });
});
