/** Tools panel state: exactly one tool is active at a time. */

export const TOOLS = ["GraphExplorer", "QADemo", "LLMIntegration", "DataExport"] as const;

export type Tool = (typeof TOOLS)[number];

export class ToolPanelState {
  private current: Tool;
  private listeners: ((tool: Tool) => void)[] = [];

  constructor(initial: Tool = "GraphExplorer") {
    this.current = initial;
  }

  get active(): Tool {
    return this.current;
  }

  setActive(tool: Tool): void {
    if (!TOOLS.includes(tool)) throw new Error(`unknown tool: ${tool}`);
    if (tool === this.current) return;
    this.current = tool;
    for (const listener of this.listeners) listener(tool);
  }

  onChange(listener: (tool: Tool) => void): void {
    this.listeners.push(listener);
  }
}
