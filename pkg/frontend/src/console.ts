/**
 * Query console: submit read-only queries, show errors inline (with the
 * parser's line/column, or a read-only notice on 403), and render
 * successful results as a table while the canvas re-renders the subgraph.
 */

import { ApiError, runQuery } from "./api";
import { isNodeCell, keyString, ResultTableDto } from "./graphModel";

const MAX_TABLE_ROWS = 100;

export class QueryConsole {
  private input: HTMLTextAreaElement;
  private notice: HTMLElement;
  private table: HTMLElement;
  private busy = false;
  onResult: (table: ResultTableDto) => void = () => {};

  constructor(input: HTMLTextAreaElement, runButton: HTMLButtonElement,
              notice: HTMLElement, table: HTMLElement) {
    this.input = input;
    this.notice = notice;
    this.table = table;
    runButton.addEventListener("click", () => void this.run());
    input.addEventListener("keydown", (event) => {
      if ((event.ctrlKey || event.metaKey) && event.key === "Enter") void this.run();
    });
  }

  setQuery(text: string): void {
    this.input.value = text;
  }

  async run(): Promise<void> {
    if (this.busy) return; // one in-flight query per console
    const text = this.input.value.trim();
    if (!text) return;
    this.busy = true;
    this.setNotice("running…", "info");
    try {
      const result = await runQuery(text);
      this.renderTable(result);
      const note = result.truncated
        ? `${result.row_count} rows (truncated)`
        : `${result.row_count ?? result.rows.length} rows`;
      this.setNotice(note, "info");
      this.onResult(result);
    } catch (err) {
      if (err instanceof ApiError && err.readOnlyViolation) {
        this.setNotice(`read-only console: ${err.detail}`, "error");
      } else if (err instanceof ApiError && err.position) {
        this.setNotice(
          `${err.detail} at line ${err.position.line}, column ${err.position.column}`,
          "error");
      } else {
        this.setNotice(err instanceof Error ? err.message : String(err), "error");
      }
    } finally {
      this.busy = false;
    }
  }

  private setNotice(text: string, kind: "info" | "error"): void {
    this.notice.textContent = text;
    this.notice.className = `notice ${kind}`;
  }

  private renderTable(result: ResultTableDto): void {
    const header = result.columns.map((c) => `<th>${c}</th>`).join("");
    const body = result.rows
      .slice(0, MAX_TABLE_ROWS)
      .map((row) => {
        const cells = row
          .map((cell) => {
            if (isNodeCell(cell)) {
              return `<td>${cell.label}:${keyString(cell.label, cell.key)}</td>`;
            }
            return `<td>${cell === null ? "" : String(cell)}</td>`;
          })
          .join("");
        return `<tr>${cells}</tr>`;
      })
      .join("");
    this.table.innerHTML =
      `<table><thead><tr>${header}</tr></thead><tbody>${body}</tbody></table>`;
  }
}
