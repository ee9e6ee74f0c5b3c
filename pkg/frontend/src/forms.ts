// Form renderers for recording evaluations and actions mid-exploration.
// The app reads the fields back on submit and issues exactly one POST.

import { escapeHtml } from "./render.js";
import type { DimensionRow } from "./types.js";

export interface EvaluationContext {
  goalId: string;
  measureId?: string | null;
  // the query that produced the evidence, auto-attached as provenance
  provenance?: string | null;
  defaultDate: string;
}

export function renderEvaluationForm(ctx: EvaluationContext): string {
  return `
    <form class="record-form" data-form="evaluation">
      <h3>record evaluation</h3>
      <label>goal
        <input name="goal_id" value="${escapeHtml(ctx.goalId)}" readonly>
      </label>
      <label>measure (optional)
        <input name="measure_id" value="${escapeHtml(ctx.measureId ?? "")}">
      </label>
      <label>conclusion
        <textarea name="text" required rows="3"></textarea>
      </label>
      <label>recorded at
        <input name="at" type="date" value="${escapeHtml(ctx.defaultDate)}" required>
      </label>
      <label>provenance (evidence query)
        <input name="provenance" value="${escapeHtml(ctx.provenance ?? "")}">
      </label>
      <button type="submit">record</button>
    </form>`;
}

export interface ActionContext {
  evaluationIds: string[];
  dimensionRows: { dimension: string; rows: DimensionRow[] }[];
  defaultDate: string;
}

export function renderActionForm(ctx: ActionContext): string {
  const targetOptions = ctx.dimensionRows
    .flatMap(({ dimension, rows }) =>
      rows.map((row) => {
        const value = `${dimension}␟${row.key}`;
        return `<option value="${escapeHtml(value)}">
          ${escapeHtml(dimension)} / ${escapeHtml(row.key)}</option>`;
      })
    )
    .join("");
  return `
    <form class="record-form" data-form="action">
      <h3>record action</h3>
      <label>caused by evaluations
        <input name="evaluation_ids" value="${escapeHtml(ctx.evaluationIds.join(","))}">
      </label>
      <label>decision
        <textarea name="text" required rows="3"></textarea>
      </label>
      <label>target rows
        <select name="targets" multiple size="6">${targetOptions}</select>
      </label>
      <label>recorded at
        <input name="at" type="date" value="${escapeHtml(ctx.defaultDate)}" required>
      </label>
      <button type="submit">record</button>
    </form>`;
}

export function readEvaluationForm(form: HTMLFormElement): {
  goal_id: string;
  measure_id: string | null;
  text: string;
  at: string;
  provenance: string | null;
} {
  const data = new FormData(form);
  const measure = String(data.get("measure_id") ?? "").trim();
  const provenance = String(data.get("provenance") ?? "").trim();
  return {
    goal_id: String(data.get("goal_id")),
    measure_id: measure || null,
    text: String(data.get("text")),
    at: String(data.get("at")),
    provenance: provenance || null,
  };
}

export function readActionForm(form: HTMLFormElement): {
  evaluation_ids: string[];
  text: string;
  targets: [string, string][];
  at: string;
} {
  const data = new FormData(form);
  const ids = String(data.get("evaluation_ids") ?? "")
    .split(",")
    .map((s) => s.trim())
    .filter(Boolean);
  const select = form.querySelector<HTMLSelectElement>('select[name="targets"]');
  const targets: [string, string][] = [];
  if (select) {
    for (const option of Array.from(select.selectedOptions)) {
      const [dimension, key] = option.value.split("␟");
      targets.push([dimension, key]);
    }
  }
  return {
    evaluation_ids: ids,
    text: String(data.get("text")),
    targets,
    at: String(data.get("at")),
  };
}
