/**
 * Tools panel: Graph Explorer templates, Q&A demos, embedding retrieval
 * with optional client-side reduction, and selection export.
 */

import { EMBEDDING_ROW_CAP, fetchEmbeddings } from "./api";
import type { GraphCanvas } from "./canvas";
import type { QueryConsole } from "./console";
import { exportEnabled, exportSelection, triggerDownload } from "./export";
import { clientPca } from "./pca";
import { ToolPanelState, Tool, TOOLS } from "./state";
import { GRAPH_EXPLORER_TEMPLATES, QA_DEMOS, QueryTemplate } from "./templates";

function templateList(
  container: HTMLElement, templates: QueryTemplate[], konsole: QueryConsole,
): void {
  for (const template of templates) {
    const card = document.createElement("div");
    card.className = "template";
    card.innerHTML = `<strong>${template.title}</strong><p>${template.description}</p>`;
    const button = document.createElement("button");
    button.textContent = "Open in console";
    // fills the console (still editable) instead of auto-submitting
    button.addEventListener("click", () => konsole.setQuery(template.query));
    card.appendChild(button);
    container.appendChild(card);
  }
}

function setupEmbeddingTool(container: HTMLElement): void {
  container.innerHTML = `
    <label>Year <input id="emb-year" type="number" value="2017"></label>
    <label>Model
      <select id="emb-model">
        <option>HASH_DEFAULT</option><option>MPNET_LIKE</option>
        <option>SECBERT_LIKE</option><option>FASTTEXT_LIKE</option>
      </select>
    </label>
    <label>Dimensions <input id="emb-dim" type="number" value="16" min="1"></label>
    <label>cveIDs (optional, comma separated)
      <input id="emb-ids" placeholder="CVE-2017-0144"></label>
    <label class="row"><input id="emb-reduce" type="checkbox" checked>
      apply client-side reduction when the light tier is served</label>
    <button id="emb-fetch">Retrieve</button>
    <div id="emb-status" class="notice info"></div>
  `;
  const status = container.querySelector("#emb-status") as HTMLElement;
  const value = (id: string) => (container.querySelector(id) as HTMLInputElement).value;

  container.querySelector("#emb-fetch")!.addEventListener("click", async () => {
    try {
      const ids = value("#emb-ids").split(",").map((s) => s.trim()).filter(Boolean);
      if (ids.length > EMBEDDING_ROW_CAP) {
        status.textContent = `at most ${EMBEDDING_ROW_CAP} ids per request`;
        return;
      }
      const dim = Number(value("#emb-dim"));
      status.textContent = "fetching…";
      const resp = await fetchEmbeddings({
        year: Number(value("#emb-year")),
        model: (container.querySelector("#emb-model") as HTMLSelectElement).value,
        dim,
        ids: ids.length ? ids : undefined,
      });
      let vectors = resp.vectors;
      let servedDim = resp.served_dim;
      const reduce = (container.querySelector("#emb-reduce") as HTMLInputElement).checked;
      if (resp.client_reduce_required && reduce) {
        vectors = clientPca(vectors, dim);
        servedDim = dim;
      }
      const missing = resp.missing_ids.length ? `, ${resp.missing_ids.length} ids missing` : "";
      status.textContent =
        `${vectors.length} vectors at ${servedDim}D (tier ${resp.tier_used}` +
        `${resp.client_reduce_required && reduce ? ", reduced in browser" : ""})${missing}`;
      triggerDownload(
        `embeddings-${resp.year}-${resp.model}-${servedDim}d.json`,
        JSON.stringify({ cve_ids: resp.cve_ids, served_dim: servedDim, vectors }),
        "application/json");
    } catch (err) {
      status.textContent = err instanceof Error ? err.message : String(err);
    }
  });
}

function setupExportTool(container: HTMLElement, canvas: GraphCanvas): void {
  container.innerHTML = `
    <p>Select nodes on the canvas (shift-click for more than one), pick the
       properties to include, then export.</p>
    <label>Properties (comma separated)
      <input id="exp-props" value="cveID,description"></label>
    <label>Format
      <select id="exp-format"><option>csv</option><option>json</option></select>
    </label>
    <button id="exp-go" disabled>Export selection</button>
    <div id="exp-status" class="notice info"></div>
  `;
  const button = container.querySelector("#exp-go") as HTMLButtonElement;
  const status = container.querySelector("#exp-status") as HTMLElement;
  canvas.onSelectionChange = (selection) => {
    button.disabled = !exportEnabled(selection);
    status.textContent = selection.size ? `${selection.size} node(s) selected` : "";
  };
  button.addEventListener("click", () => {
    try {
      const props = (container.querySelector("#exp-props") as HTMLInputElement).value
        .split(",").map((s) => s.trim()).filter(Boolean);
      const format = (container.querySelector("#exp-format") as HTMLSelectElement)
        .value as "csv" | "json";
      const body = exportSelection(canvas.selectedNodes(), props, format);
      triggerDownload(`selection.${format}`, body,
                      format === "csv" ? "text/csv" : "application/json");
      status.textContent = `exported ${canvas.selectedNodes().length} node(s)`;
    } catch (err) {
      status.textContent = err instanceof Error ? err.message : String(err);
    }
  });
}

export function setupToolsPanel(
  root: HTMLElement, konsole: QueryConsole, canvas: GraphCanvas,
): ToolPanelState {
  const state = new ToolPanelState();
  const tabs = root.querySelector(".tool-tabs") as HTMLElement;
  const bodies = new Map<Tool, HTMLElement>();

  const labels: Record<Tool, string> = {
    GraphExplorer: "Graph Explorer",
    QADemo: "Q&A Demo",
    LLMIntegration: "LLM Integration",
    DataExport: "Data Export",
  };

  for (const tool of TOOLS) {
    const tab = document.createElement("button");
    tab.textContent = labels[tool];
    tab.dataset.tool = tool;
    tab.addEventListener("click", () => state.setActive(tool));
    tabs.appendChild(tab);

    const body = document.createElement("div");
    body.className = "tool-body";
    root.appendChild(body);
    bodies.set(tool, body);
  }

  templateList(bodies.get("GraphExplorer")!, GRAPH_EXPLORER_TEMPLATES, konsole);
  templateList(bodies.get("QADemo")!, QA_DEMOS, konsole);
  setupEmbeddingTool(bodies.get("LLMIntegration")!);
  setupExportTool(bodies.get("DataExport")!, canvas);

  const apply = (active: Tool) => {
    for (const [tool, body] of bodies) {
      body.style.display = tool === active ? "block" : "none";
    }
    tabs.querySelectorAll("button").forEach((b) => {
      b.classList.toggle("active", b.dataset.tool === active);
    });
  };
  state.onChange(apply);
  apply(state.active);
  return state;
}
