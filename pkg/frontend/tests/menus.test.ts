// The per-kind method menu rendered by the UI must equal the dispatch table
// the service advertises, for every kind, with nothing hard-coded.

import { describe, expect, test } from "vitest";

import { ApiClient } from "../src/api.js";
import { renderConceptCard } from "../src/render.js";
import type { ConceptVersion } from "../src/types.js";
import { API_BASE } from "./config.js";

const api = new ApiClient(API_BASE);

const ALL_KINDS = [
  "Action", "BusinessConcept", "Evaluation", "ExternalEntity", "ExternalEvent",
  "Function", "Goal", "InternalEntity", "Measure", "Process",
];

function synthetic(kind: string): ConceptVersion {
  return {
    logical_id: `probe_${kind.toLowerCase()}`,
    version_no: 1,
    kind,
    name: `${kind} probe`,
    description: "",
    attributes: {},
    valid_from: "2000-01-01",
    valid_to: null,
  };
}

function menuLabels(): string[] {
  return Array.from(
    document.querySelectorAll<HTMLButtonElement>(".method-menu button")
  ).map((b) => b.textContent!.trim());
}

describe("method menus", () => {
  test("server advertises a menu for every kind", async () => {
    const table = await api.methodTable();
    expect(Object.keys(table).sort()).toEqual(ALL_KINDS);
    for (const methods of Object.values(table)) {
      expect(methods).toEqual([...methods].sort());
      expect(methods).toContain("history");
    }
  });

  test("rendered menu equals the advertised table for all kinds", async () => {
    const table = await api.methodTable();
    for (const kind of ALL_KINDS) {
      document.body.innerHTML = renderConceptCard(synthetic(kind), table[kind]);
      expect(menuLabels(), kind).toEqual(table[kind]);
    }
  });

  test("live instances render the fetched menu, not a local list", async () => {
    const table = await api.methodTable();
    for (const id of ["dept_bsd", "measure_npa", "goal_supervision", "npa"]) {
      const version = await api.concept(id, "2001-03-31");
      document.body.innerHTML = renderConceptCard(version, table[version.kind]);
      expect(menuLabels(), id).toEqual(table[version.kind]);
    }
  });

  test("entity menu includes the metadata-to-data hop", async () => {
    const table = await api.methodTable();
    expect(table["InternalEntity"]).toContain("getDimension");
    expect(table["Measure"]).toContain("getFacts");
    expect(table["Goal"]).not.toContain("getDimension");
  });
});
