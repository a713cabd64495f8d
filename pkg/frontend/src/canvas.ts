/**
 * Force-directed graph canvas: pan/zoom, draggable nodes, click-to-inspect
 * property panel, neighbor highlighting, multi-select for export.
 */

import * as d3 from "d3";

import { GraphNodeView, GraphView, LABEL_COLORS, neighborhood } from "./graphModel";

interface SimNode extends GraphNodeView, d3.SimulationNodeDatum {}

interface SimEdge extends d3.SimulationLinkDatum<SimNode> {
  type: string;
}

export class GraphCanvas {
  private svg: d3.Selection<SVGSVGElement, unknown, null, undefined>;
  private root: d3.Selection<SVGGElement, unknown, null, undefined>;
  private panel: HTMLElement;
  private emptyState: HTMLElement;
  private simulation: d3.Simulation<SimNode, SimEdge> | null = null;
  private view: GraphView = { nodes: [], edges: [] };

  readonly selection = new Set<string>();
  onSelectionChange: (selection: ReadonlySet<string>) => void = () => {};

  constructor(svgElement: SVGSVGElement, panelElement: HTMLElement, emptyElement: HTMLElement) {
    this.svg = d3.select(svgElement);
    this.panel = panelElement;
    this.emptyState = emptyElement;
    this.root = this.svg.append("g");
    this.svg.call(
      d3
        .zoom<SVGSVGElement, unknown>()
        .scaleExtent([0.2, 6])
        .on("zoom", (event) => this.root.attr("transform", event.transform)),
    );
  }

  get nodeCount(): number {
    return this.view.nodes.length;
  }

  selectedNodes(): GraphNodeView[] {
    return this.view.nodes.filter((n) => this.selection.has(n.id));
  }

  render(view: GraphView): void {
    this.view = view;
    this.selection.clear();
    this.onSelectionChange(this.selection);
    this.root.selectAll("*").remove();
    this.panel.innerHTML = "";
    this.simulation?.stop();
    this.emptyState.style.display = view.nodes.length ? "none" : "block";
    if (!view.nodes.length) return;

    const width = this.svg.node()?.clientWidth ?? 800;
    const height = this.svg.node()?.clientHeight ?? 600;
    const nodes: SimNode[] = view.nodes.map((n) => ({ ...n }));
    const byId = new Map(nodes.map((n) => [n.id, n]));
    const edges: SimEdge[] = view.edges.map((e) => ({
      type: e.type,
      source: byId.get(e.source)!,
      target: byId.get(e.target)!,
    }));

    const link = this.root
      .append("g")
      .selectAll<SVGLineElement, SimEdge>("line")
      .data(edges)
      .join("line")
      .attr("class", "edge");

    const edgeLabel = this.root
      .append("g")
      .selectAll<SVGTextElement, SimEdge>("text")
      .data(edges)
      .join("text")
      .attr("class", "edge-label")
      .text((d) => d.type);

    const node = this.root
      .append("g")
      .selectAll<SVGGElement, SimNode>("g")
      .data(nodes)
      .join("g")
      .attr("class", "node")
      .call(
        d3
          .drag<SVGGElement, SimNode>()
          .on("start", (event, d) => {
            if (!event.active) this.simulation?.alphaTarget(0.3).restart();
            d.fx = d.x;
            d.fy = d.y;
          })
          .on("drag", (event, d) => {
            d.fx = event.x;
            d.fy = event.y;
          })
          .on("end", (event, d) => {
            if (!event.active) this.simulation?.alphaTarget(0);
            d.fx = null;
            d.fy = null;
          }),
      );

    node
      .append("circle")
      .attr("r", 14)
      .attr("fill", (d) => LABEL_COLORS[d.label] ?? "#999");

    node
      .append("text")
      .attr("dy", 26)
      .attr("text-anchor", "middle")
      .text((d) => (d.keyString.length > 22 ? d.keyString.slice(0, 20) + "…" : d.keyString));

    node.on("click", (event: MouseEvent, d) => {
      event.stopPropagation();
      if (event.shiftKey) {
        this.toggleSelect(d.id);
      } else {
        this.selection.clear();
        this.selection.add(d.id);
      }
      this.onSelectionChange(this.selection);
      this.showProperties(d);
      const near = neighborhood(this.view, d.id);
      node.classed("dimmed", (n) => !near.has(n.id));
      node.classed("selected", (n) => this.selection.has(n.id));
      link.classed("dimmed", (e) => {
        const s = (e.source as SimNode).id;
        const t = (e.target as SimNode).id;
        return s !== d.id && t !== d.id;
      });
    });

    this.svg.on("click", () => {
      this.selection.clear();
      this.onSelectionChange(this.selection);
      node.classed("dimmed", false).classed("selected", false);
      link.classed("dimmed", false);
      this.panel.innerHTML = "";
    });

    this.simulation = d3
      .forceSimulation(nodes)
      .force("link", d3.forceLink<SimNode, SimEdge>(edges).distance(110).strength(0.6))
      .force("charge", d3.forceManyBody().strength(-320))
      .force("center", d3.forceCenter(width / 2, height / 2))
      .force("collide", d3.forceCollide(30))
      .on("tick", () => {
        link
          .attr("x1", (d) => (d.source as SimNode).x!)
          .attr("y1", (d) => (d.source as SimNode).y!)
          .attr("x2", (d) => (d.target as SimNode).x!)
          .attr("y2", (d) => (d.target as SimNode).y!);
        edgeLabel
          .attr("x", (d) => (((d.source as SimNode).x! + (d.target as SimNode).x!) / 2))
          .attr("y", (d) => (((d.source as SimNode).y! + (d.target as SimNode).y!) / 2));
        node.attr("transform", (d) => `translate(${d.x},${d.y})`);
      });
  }

  private toggleSelect(id: string): void {
    if (this.selection.has(id)) {
      this.selection.delete(id);
    } else {
      this.selection.add(id);
    }
  }

  private showProperties(node: GraphNodeView): void {
    const rows = Object.entries(node.props)
      .map(
        ([name, value]) =>
          `<tr><td class="prop-name">${name}</td><td>${String(value)}</td></tr>`,
      )
      .join("");
    this.panel.innerHTML = `
      <h3><span class="chip" style="background:${LABEL_COLORS[node.label]}"></span>
          ${node.label} · ${node.keyString}</h3>
      <table>${rows}</table>`;
  }
}
