import "./style.css";

import { fetchRelationships } from "./api";
import { GraphCanvas } from "./canvas";
import { QueryConsole } from "./console";
import { buildGraphView, EDGE_ENDPOINTS, RelRow, ResultTableDto } from "./graphModel";
import { setupToolsPanel } from "./tools";
import { GRAPH_EXPLORER_TEMPLATES } from "./templates";

const canvas = new GraphCanvas(
  document.querySelector("#graph") as SVGSVGElement,
  document.querySelector("#property-panel") as HTMLElement,
  document.querySelector("#empty-state") as HTMLElement,
);

const konsole = new QueryConsole(
  document.querySelector("#query-input") as HTMLTextAreaElement,
  document.querySelector("#query-run") as HTMLButtonElement,
  document.querySelector("#query-notice") as HTMLElement,
  document.querySelector("#result-table") as HTMLElement,
);

let relationCache: Record<string, RelRow[]> | null = null;

async function relations(): Promise<Record<string, RelRow[]>> {
  if (relationCache === null) {
    const entries = await Promise.all(
      Object.keys(EDGE_ENDPOINTS).map(async (type) => {
        try {
          return [type, await fetchRelationships(type)] as const;
        } catch {
          return [type, []] as const;
        }
      }),
    );
    relationCache = Object.fromEntries(entries) as Record<string, RelRow[]>;
  }
  return relationCache;
}

konsole.onResult = async (table: ResultTableDto) => {
  canvas.render(buildGraphView(table, await relations()));
};

setupToolsPanel(document.querySelector("#tools") as HTMLElement, konsole, canvas);

// boot with the case-study template so the canvas is never empty
konsole.setQuery(GRAPH_EXPLORER_TEMPLATES[0].query);
void konsole.run();
