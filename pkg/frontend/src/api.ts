// Typed client for the metarepo HTTP service. Every UI action funnels
// through one of these calls; the client adds no interpretation beyond
// error unwrapping.

import type {
  ApiErrorBody,
  ConceptVersion,
  DimensionDef,
  DimensionRow,
  FactDef,
  MethodTable,
  QueryResponse,
  TableResult,
  WarehouseQuerySpec,
} from "./types.js";

export class ApiError extends Error {
  readonly status: number;
  readonly body: ApiErrorBody;

  constructor(status: number, body: ApiErrorBody) {
    super(body.message);
    this.status = status;
    this.body = body;
  }
}

export class ApiClient {
  constructor(readonly baseUrl: string = "") {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      method,
      headers: body === undefined ? {} : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await response.text();
    const parsed = text ? JSON.parse(text) : null;
    if (!response.ok) {
      throw new ApiError(response.status, parsed as ApiErrorBody);
    }
    return parsed as T;
  }

  private get<T>(path: string): Promise<T> {
    return this.request<T>("GET", path);
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>("POST", path, body);
  }

  methodTable(): Promise<MethodTable> {
    return this.get("/nav/methods");
  }

  concepts(params: { kind?: string; name?: string; asof?: string }): Promise<ConceptVersion[]> {
    const search = new URLSearchParams();
    if (params.kind) search.set("kind", params.kind);
    if (params.name) search.set("name", params.name);
    if (params.asof) search.set("asof", params.asof);
    const suffix = search.toString();
    return this.get(`/concepts${suffix ? "?" + suffix : ""}`);
  }

  concept(id: string, asof?: string): Promise<ConceptVersion> {
    const suffix = asof ? `?asof=${asof}` : "";
    return this.get(`/concepts/${encodeURIComponent(id)}${suffix}`);
  }

  history(id: string): Promise<ConceptVersion[]> {
    return this.get(`/concepts/${encodeURIComponent(id)}/history`);
  }

  navigate(id: string, method: string, asof?: string): Promise<string[]> {
    const suffix = asof ? `?asof=${asof}` : "";
    return this.get(`/concepts/${encodeURIComponent(id)}/nav/${method}${suffix}`);
  }

  navigateDuring(id: string, method: string, from: string, to: string): Promise<string[]> {
    return this.get(
      `/concepts/${encodeURIComponent(id)}/nav/${method}?from=${from}&to=${to}`
    );
  }

  getDimension(id: string, asof?: string): Promise<{ dimension: string; rows: DimensionRow[] }> {
    const suffix = asof ? `?asof=${asof}` : "";
    return this.get(`/concepts/${encodeURIComponent(id)}/nav/getDimension${suffix}`);
  }

  getFacts(id: string, asof?: string): Promise<{ fact: string; column: string }> {
    const suffix = asof ? `?asof=${asof}` : "";
    return this.get(`/concepts/${encodeURIComponent(id)}/nav/getFacts${suffix}`);
  }

  dimensions(): Promise<DimensionDef[]> {
    return this.get("/warehouse/dims");
  }

  facts(): Promise<FactDef[]> {
    return this.get("/warehouse/facts");
  }

  dimensionRows(dimension: string, asof?: string): Promise<DimensionRow[]> {
    const suffix = asof ? `?asof=${asof}` : "";
    return this.get(`/warehouse/dims/${encodeURIComponent(dimension)}/rows${suffix}`);
  }

  factMeasures(fact: string, asof?: string): Promise<string[]> {
    const suffix = asof ? `?asof=${asof}` : "";
    return this.get(`/warehouse/facts/${encodeURIComponent(fact)}/measures${suffix}`);
  }

  rowConcepts(dimension: string, key: string, asof?: string): Promise<string[]> {
    const suffix = asof ? `?asof=${asof}` : "";
    return this.get(
      `/warehouse/dims/${encodeURIComponent(dimension)}/rows/${encodeURIComponent(key)}/concepts${suffix}`
    );
  }

  rowActions(dimension: string, key: string, asof?: string): Promise<string[]> {
    const suffix = asof ? `?asof=${asof}` : "";
    return this.get(
      `/warehouse/dims/${encodeURIComponent(dimension)}/rows/${encodeURIComponent(key)}/actions${suffix}`
    );
  }

  warehouseQuery(spec: WarehouseQuerySpec): Promise<TableResult> {
    return this.post("/warehouse/query", spec);
  }

  navql(q: string, now?: string): Promise<QueryResponse> {
    return this.post("/query", { q, now: now ?? null });
  }

  recordEvaluation(body: {
    goal_id: string;
    measure_id?: string | null;
    text: string;
    at: string;
    provenance?: string | null;
  }): Promise<{ evaluation_id: string }> {
    return this.post("/evaluations", body);
  }

  recordAction(body: {
    evaluation_ids: string[];
    text: string;
    targets: [string, string][];
    at: string;
  }): Promise<{
    action_id: string;
    association_ids: string[];
    link_ids: string[];
    free_standing: boolean;
  }> {
    return this.post("/actions", body);
  }
}
