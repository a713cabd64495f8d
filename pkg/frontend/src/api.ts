/**
 * Typed client for the graph platform API. The UI talks to these five
 * documented routes and nothing else; embedding requests always carry
 * the browser-origin header and are capped client-side before sending.
 */

import type { RelRow, ResultTableDto } from "./graphModel";

export const BASE = "/api/v1";
export const ORIGIN_HEADER = "x-client-origin";
export const EMBEDDING_ROW_CAP = 200;

export class ApiError extends Error {
  status: number;
  detail: string;
  position?: { line: number; column: number };
  keyword?: string;

  constructor(status: number, body: Record<string, unknown>) {
    super(`${status}: ${body.detail ?? body.error ?? "request failed"}`);
    this.status = status;
    this.detail = String(body.detail ?? body.error ?? "");
    if (body.position) this.position = body.position as ApiError["position"];
    if (body.keyword) this.keyword = String(body.keyword);
  }

  get readOnlyViolation(): boolean {
    return this.status === 403;
  }
}

async function requestJson<T>(path: string, init?: RequestInit): Promise<T> {
  const resp = await fetch(BASE + path, init);
  const body = await resp.json().catch(() => ({ error: resp.statusText }));
  if (!resp.ok) throw new ApiError(resp.status, body);
  return body as T;
}

export interface DocsDto {
  endpoints: Record<string, unknown>;
  limits: { embedding_row_cap: number; rate_limit_per_minute: number; cypher_row_cap: number };
}

export function fetchDocs(): Promise<DocsDto> {
  return requestJson<DocsDto>("/docs");
}

export function runQuery(query: string): Promise<ResultTableDto> {
  return requestJson<ResultTableDto>("/cypher_query", {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify({ query }),
  });
}

export async function fetchRelationships(type: string): Promise<RelRow[]> {
  const params = new URLSearchParams({ rel_type: type, file_format: "json" });
  const resp = await fetch(`${BASE}/relationship_download?${params}`);
  if (!resp.ok) throw new ApiError(resp.status, await resp.json().catch(() => ({})));
  return (await resp.json()) as RelRow[];
}

export interface EmbeddingRequest {
  year: number;
  model: string;
  dim: number;
  ids?: string[];
}

export interface EmbeddingResponseDto {
  vectors: number[][];
  served_dim: number;
  tier_used: string;
  client_reduce_required: boolean;
  model: string;
  year: number;
  cve_ids: string[];
  missing_ids: string[];
}

export function fetchEmbeddings(req: EmbeddingRequest): Promise<EmbeddingResponseDto> {
  if (req.ids && req.ids.length > EMBEDDING_ROW_CAP) {
    throw new Error(
      `at most ${EMBEDDING_ROW_CAP} rows per request; narrow the ids filter`);
  }
  const params = new URLSearchParams({
    year: String(req.year),
    model: req.model,
    dim: String(req.dim),
  });
  if (req.ids?.length) params.set("ids", req.ids.join(","));
  return requestJson<EmbeddingResponseDto>(`/llm_embedding?${params}`, {
    headers: { [ORIGIN_HEADER]: "browser" },
  });
}

export function nodeDownloadUrl(nodeType: string, props: string[], format: string): string {
  const params = new URLSearchParams({
    node_type: nodeType,
    props: props.join(","),
    file_format: format,
  });
  return `${BASE}/node_download?${params}`;
}
