// Wire types mirroring the service's canonical JSON bodies.

export type Scalar = string | number | { $date: string };

export interface ConceptVersion {
  logical_id: string;
  version_no: number;
  kind: string;
  name: string;
  description: string;
  attributes: Record<string, Scalar>;
  valid_from: string;
  valid_to: string | null;
}

export interface DimensionDef {
  name: string;
  key_attr: string;
  attrs: string[];
}

export interface DimensionRow {
  dimension: string;
  key: string;
  attrs: Record<string, Scalar>;
  valid_from: string;
  valid_to: string | null;
}

export interface FactDef {
  name: string;
  dims: string[];
  measures: string[];
}

export interface TableResult {
  columns: string[];
  rows: (string | number | null)[][];
}

export type QueryResponse =
  | { type: "concepts"; items: ConceptVersion[] }
  | { type: "history"; items: ConceptVersion[] }
  | ({ type: "table" } & TableResult);

export interface ApiErrorBody {
  code: "not_found" | "validation" | "conflict" | "parse_error" | "bad_request";
  message: string;
  detail: {
    offset?: number;
    expected?: string[];
    violations?: string[];
    [key: string]: unknown;
  } | null;
}

// kind name -> advertised method menu, served by GET /nav/methods
export type MethodTable = Record<string, string[]>;

export interface TimeSelection {
  mode: "asof" | "during";
  asof: string;
  from: string;
  to: string;
}

export interface WarehouseQuerySpec {
  fact: string;
  where: [string, string, string, Scalar][];
  group_by: [string, string][];
  agg: [string, string][];
  time_range: { valid_from: string; valid_to: string | null } | null;
  dim_as_of?: string | null;
}

export function scalarText(value: Scalar | null | undefined): string {
  if (value === null || value === undefined) return "";
  if (typeof value === "object") return value.$date;
  return String(value);
}
