// The navigator shell: one state object, one event dispatcher, and a fetch +
// render loop. Method menus come from the server's advertised table, the
// global time selection applies to every navigation call, and every control
// maps onto an API call.

import { ApiClient, ApiError } from "./api.js";
import { readActionForm, readEvaluationForm, renderActionForm, renderEvaluationForm } from "./forms.js";
import { byteOffsetToCharIndex, renderParseError } from "./navqlBar.js";
import {
  escapeHtml,
  renderConceptCard,
  renderConceptList,
  renderConceptRefs,
  renderDimensionRows,
  renderErrorBox,
  renderHistoryTimeline,
  renderLineChart,
  renderTable,
  type SeriesPoint,
} from "./render.js";
import type { ConceptVersion, MethodTable, TimeSelection } from "./types.js";
import { DEMO_NOW, WALKTHROUGHS, runWalkthrough, type WalkthroughContext } from "./walkthrough.js";

const KINDS = [
  "BusinessConcept", "Function", "ExternalEvent", "InternalEntity",
  "ExternalEntity", "Process", "Goal", "Measure", "Evaluation", "Action",
];

function quarterEndsBetween(fromIso: string, toIso: string): string[] {
  const out: string[] = [];
  const from = new Date(fromIso);
  const to = new Date(toIso);
  for (let year = from.getUTCFullYear(); year <= to.getUTCFullYear(); year += 1) {
    for (const [month, day] of [[2, 31], [5, 30], [8, 30], [11, 31]] as const) {
      const q = new Date(Date.UTC(year, month, day));
      if (q >= from && q < to) out.push(q.toISOString().slice(0, 10));
    }
  }
  return out;
}

function nextDay(iso: string): string {
  return new Date(Date.parse(iso) + 86_400_000).toISOString().slice(0, 10);
}

export class App {
  time: TimeSelection = { mode: "asof", asof: DEMO_NOW, from: "2000-07-01", to: "2001-01-01" };
  methodTable: MethodTable = {};
  lastQuery = "";

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient
  ) {}

  async init(): Promise<void> {
    this.methodTable = await this.api.methodTable();
    this.renderChrome();
    this.bind();
  }

  // -- chrome -----------------------------------------------------------

  private renderChrome(): void {
    const kindButtons = KINDS.map(
      (kind) => `<button data-action="browse-kind" data-kind="${kind}">${kind}</button>`
    ).join("");
    const walkthroughButtons = WALKTHROUGHS.map(
      (w) => `<button data-action="walkthrough" data-walkthrough="${w.id}">${escapeHtml(w.title)}</button>`
    ).join("");
    this.root.innerHTML = `
      <header class="topbar">
        <h1>metarepo navigator</h1>
        <form id="navql-form">
          <input id="navql-input" name="q" placeholder='NavQL, e.g. #npa.history()'
                 spellcheck="false" autocomplete="off">
          <button type="submit">run</button>
        </form>
        <div id="time-controls">
          <label><input type="radio" name="time-mode" value="asof" checked> as of
            <input type="date" id="time-asof" value="${this.time.asof}"></label>
          <label><input type="radio" name="time-mode" value="during"> during
            <input type="date" id="time-from" value="${this.time.from}"> ..
            <input type="date" id="time-to" value="${this.time.to}"></label>
        </div>
      </header>
      <div class="columns">
        <aside id="sidebar">
          <h2>browse</h2>
          <nav class="kind-nav">${kindButtons}</nav>
          <h2>walkthroughs</h2>
          <nav class="walkthrough-nav">${walkthroughButtons}</nav>
        </aside>
        <main id="main"><p class="empty-state">pick a kind, run a query, or start a walkthrough</p></main>
      </div>
      <div id="statusbar"></div>`;
  }

  private main(): HTMLElement {
    return this.root.querySelector("#main") as HTMLElement;
  }

  private status(text: string): void {
    const bar = this.root.querySelector("#statusbar");
    if (bar) bar.textContent = text;
  }

  private bind(): void {
    this.root.addEventListener("click", (event) => {
      const target = (event.target as HTMLElement).closest("[data-action]");
      if (!(target instanceof HTMLElement)) return;
      event.preventDefault();
      void this.dispatch(target);
    });
    this.root.addEventListener("submit", (event) => {
      const form = event.target as HTMLFormElement;
      event.preventDefault();
      if (form.id === "navql-form") {
        const input = form.querySelector<HTMLInputElement>("#navql-input");
        if (input) void this.runNavql(input.value);
      } else if (form.dataset.form === "evaluation") {
        void this.submitEvaluation(form);
      } else if (form.dataset.form === "action") {
        void this.submitAction(form);
      } else if (form.dataset.form === "data-panel") {
        void this.runDataPanel(form);
      }
    });
    this.root.addEventListener("change", (event) => {
      const input = event.target as HTMLInputElement;
      if (input.name === "time-mode") this.time.mode = input.value as "asof" | "during";
      if (input.id === "time-asof") this.time.asof = input.value;
      if (input.id === "time-from") this.time.from = input.value;
      if (input.id === "time-to") this.time.to = input.value;
    });
  }

  private async dispatch(el: HTMLElement): Promise<void> {
    const data = el.dataset;
    try {
      switch (data.action) {
        case "browse-kind":
          return await this.browseKind(data.kind as string);
        case "open":
          return await this.openConcept(data.id as string);
        case "method":
          return await this.runMethod(data.id as string, data.method as string);
        case "row-metadata":
          return await this.showRowMetadata(data.dimension as string, data.key as string);
        case "evaluation-form":
          return this.showEvaluationForm(data.goal as string);
        case "action-form":
          return await this.showActionForm(data.evaluation as string);
        case "data-panel":
          return await this.showDataPanel(data.measure as string);
        case "walkthrough":
          return await this.runWalkthroughPanel(data.walkthrough as string);
      }
    } catch (error) {
      this.showError(error);
    }
  }

  private showError(error: unknown): void {
    if (error instanceof ApiError) {
      this.main().insertAdjacentHTML(
        "afterbegin",
        renderErrorBox(`${error.body.code}: ${error.body.message}`)
      );
    } else {
      this.main().insertAdjacentHTML("afterbegin", renderErrorBox(String(error)));
    }
  }

  // -- views --------------------------------------------------------------

  async browseKind(kind: string): Promise<void> {
    const items = await this.api.concepts({ kind, asof: this.time.asof });
    this.main().innerHTML = renderConceptList(items, `${kind} as of ${this.time.asof}`);
  }

  async openConcept(id: string): Promise<void> {
    const version = await this.api.concept(id, this.time.asof);
    const menu = this.methodTable[version.kind] ?? [];
    this.main().innerHTML = renderConceptCard(version, menu);
  }

  async runMethod(id: string, method: string): Promise<void> {
    if (method === "history") {
      const versions = await this.api.history(id);
      this.main().innerHTML = `
        <h3>history of #${escapeHtml(id)}</h3>
        ${renderHistoryTimeline(versions)}`;
      return;
    }
    if (method === "getDimension") {
      const result = await this.api.getDimension(id, this.time.asof);
      this.main().innerHTML = `
        <h3>dimension ${escapeHtml(result.dimension)} as of ${this.time.asof}</h3>
        ${renderDimensionRows(result.dimension, result.rows)}`;
      return;
    }
    if (method === "getFacts") {
      const target = await this.api.getFacts(id, this.time.asof);
      this.main().innerHTML = `
        <h3>fact behind #${escapeHtml(id)}</h3>
        <p><code>${escapeHtml(target.fact)}.${escapeHtml(target.column)}</code></p>
        <button data-action="data-panel" data-measure="${escapeHtml(id)}">open data panel</button>`;
      return;
    }
    const ids =
      this.time.mode === "during"
        ? await this.api.navigateDuring(id, method, this.time.from, this.time.to)
        : await this.api.navigate(id, method, this.time.asof);
    const suffix =
      this.time.mode === "during"
        ? `during [${this.time.from}, ${this.time.to})`
        : `as of ${this.time.asof}`;
    this.main().innerHTML = renderConceptRefs(ids, `${method} on #${id} ${suffix}`);
  }

  async showRowMetadata(dimension: string, key: string): Promise<void> {
    const ids = await this.api.rowConcepts(dimension, key, this.time.asof);
    this.main().innerHTML = renderConceptRefs(
      ids, `metadata for (${dimension}, ${key}) as of ${this.time.asof}`
    );
  }

  async runNavql(text: string): Promise<void> {
    this.lastQuery = text;
    try {
      const result = await this.api.navql(text, this.time.asof);
      if (result.type === "table") {
        this.main().innerHTML = `
          <h3>query result</h3>
          ${renderTable({ columns: result.columns, rows: result.rows })}`;
      } else if (result.type === "history") {
        this.main().innerHTML = `
          <h3>history</h3>${renderHistoryTimeline(result.items)}`;
      } else {
        this.main().innerHTML = renderConceptList(result.items, "query result");
      }
    } catch (error) {
      if (error instanceof ApiError && error.body.code === "parse_error") {
        const detail = error.body.detail ?? {};
        this.main().innerHTML = renderParseError(
          text, Number(detail.offset ?? 0), (detail.expected as string[]) ?? []
        );
        return;
      }
      throw error;
    }
  }

  // -- data panel -----------------------------------------------------------

  async showDataPanel(measureId: string): Promise<void> {
    const target = await this.api.getFacts(measureId, this.time.asof);
    const dims = await this.api.dimensions();
    const attrOptions = dims
      .flatMap((d) => d.attrs.map((a) => `${d.name}.${a}`))
      .map((ref) => `<option value="${escapeHtml(ref)}">${escapeHtml(ref)}</option>`)
      .join("");
    this.main().innerHTML = `
      <section class="data-panel" data-measure="${escapeHtml(measureId)}"
               data-fact="${escapeHtml(target.fact)}" data-column="${escapeHtml(target.column)}">
        <h3>data panel: ${escapeHtml(target.fact)}.${escapeHtml(target.column)}</h3>
        <form data-form="data-panel">
          <label>aggregate
            <select name="agg">
              <option>avg</option><option>sum</option><option>min</option>
              <option>max</option><option>count</option>
            </select>
          </label>
          <label>group by
            <select name="group_by"><option value="">(none)</option>${attrOptions}</select>
          </label>
          <label>filter
            <select name="filter_attr"><option value="">(none)</option>${attrOptions}</select>
            <select name="filter_op">
              <option>=</option><option>!=</option><option>&lt;</option>
              <option>&lt;=</option><option>&gt;</option><option>&gt;=</option>
            </select>
            <input name="filter_value" placeholder="value">
          </label>
          <label>from <input type="date" name="range_from" value="1999-01-01"></label>
          <label>to <input type="date" name="range_to" value="2001-07-01"></label>
          <label><input type="checkbox" name="chart"> quarterly line chart</label>
          <button type="submit">run</button>
        </form>
        <div class="data-panel-result"></div>
      </section>`;
  }

  private async runDataPanel(form: HTMLFormElement): Promise<void> {
    const panel = form.closest(".data-panel") as HTMLElement;
    const fact = panel.dataset.fact as string;
    const column = panel.dataset.column as string;
    const data = new FormData(form);
    const agg = String(data.get("agg"));
    const groupRef = String(data.get("group_by") ?? "");
    const filterRef = String(data.get("filter_attr") ?? "");
    const where: [string, string, string, string | number][] = [];
    if (filterRef) {
      const [dim, attr] = filterRef.split(".");
      const raw = String(data.get("filter_value") ?? "");
      const numeric = raw !== "" && !Number.isNaN(Number(raw));
      where.push([dim, attr, String(data.get("filter_op")), numeric ? Number(raw) : raw]);
    }
    const rangeFrom = String(data.get("range_from"));
    const rangeTo = String(data.get("range_to"));
    const output = panel.querySelector(".data-panel-result") as HTMLElement;

    const dims = await this.api.dimensions();
    const keyColumn = groupRef
      ? dims
          .filter((d) => groupRef === `${d.name}.${d.key_attr}`)
          .map((d) => ({ column: groupRef, dimension: d.name }))[0]
      : undefined;

    if (data.get("chart")) {
      const series: SeriesPoint[] = [];
      for (const quarter of quarterEndsBetween(rangeFrom, rangeTo)) {
        const point = await this.api.warehouseQuery({
          fact,
          where,
          group_by: [],
          agg: [[agg, column]],
          time_range: { valid_from: quarter, valid_to: nextDay(quarter) },
        });
        if (point.rows.length > 0) {
          series.push({ label: quarter, value: Number(point.rows[0][0]) });
        }
      }
      output.innerHTML = renderLineChart(series, `${agg}(${column}) per quarter`);
      return;
    }

    const table = await this.api.warehouseQuery({
      fact,
      where,
      group_by: groupRef ? [groupRef.split(".") as [string, string]] : [],
      agg: [[agg, column]],
      time_range: { valid_from: rangeFrom, valid_to: rangeTo },
    });
    output.innerHTML = renderTable(table, keyColumn ? { keyColumn } : {});
  }

  // -- recording forms -------------------------------------------------------

  showEvaluationForm(goalId: string): void {
    this.main().insertAdjacentHTML(
      "beforeend",
      renderEvaluationForm({
        goalId,
        provenance: this.lastQuery || null,
        defaultDate: this.time.asof,
      })
    );
  }

  private async submitEvaluation(form: HTMLFormElement): Promise<void> {
    const created = await this.api.recordEvaluation(readEvaluationForm(form));
    this.status(`recorded evaluation ${created.evaluation_id}`);
    await this.openConcept(created.evaluation_id);
  }

  async showActionForm(evaluationId: string): Promise<void> {
    const dims = await this.api.dimensions();
    const dimensionRows = [];
    for (const dim of dims) {
      dimensionRows.push({
        dimension: dim.name,
        rows: await this.api.dimensionRows(dim.name, this.time.asof),
      });
    }
    this.main().insertAdjacentHTML(
      "beforeend",
      renderActionForm({
        evaluationIds: [evaluationId],
        dimensionRows,
        defaultDate: this.time.asof,
      })
    );
  }

  private async submitAction(form: HTMLFormElement): Promise<void> {
    const created = await this.api.recordAction(readActionForm(form));
    this.status(
      `recorded action ${created.action_id}` +
        (created.free_standing ? " (free-standing)" : "")
    );
    await this.openConcept(created.action_id);
  }

  // -- walkthrough mode --------------------------------------------------------

  async runWalkthroughPanel(id: string): Promise<void> {
    const walkthrough = WALKTHROUGHS.find((w) => w.id === id);
    if (!walkthrough) return;
    const ctx: WalkthroughContext = { now: DEMO_NOW };
    this.main().innerHTML = `
      <section class="walkthrough" data-walkthrough="${walkthrough.id}">
        <h3>${escapeHtml(walkthrough.title)}</h3>
        <ol class="walkthrough-steps"></ol>
      </section>`;
    const list = this.main().querySelector(".walkthrough-steps") as HTMLElement;
    await runWalkthrough(walkthrough, this.api, ctx, (step, result) => {
      list.insertAdjacentHTML(
        "beforeend",
        `<li>
           <h4>${escapeHtml(step.title)}</h4>
           <p class="prefill">${escapeHtml(step.prefill)}</p>
           <p class="step-result">${escapeHtml(result.summary)}</p>
         </li>`
      );
    });
    if (ctx.series) {
      this.main().insertAdjacentHTML(
        "beforeend", renderLineChart(ctx.series, "NPA of XYZ Bank per quarter")
      );
    }
    this.status(
      `walkthrough complete` +
        (ctx.evaluationId ? `; evaluation ${ctx.evaluationId}` : "") +
        (ctx.actionId ? `; action ${ctx.actionId}` : "")
    );
  }
}

export { byteOffsetToCharIndex };
