// Guided replays of the two analyst walkthroughs against the demo dataset.
// Each step pre-fills one UI action and runs it through the API client; the
// shared context threads results (the recorded evaluation feeds the final
// action) so a completed run leaves a new Evaluation and a new Action in the
// repository.

import type { ApiClient } from "./api.js";
import type { SeriesPoint } from "./render.js";

export const DEMO_NOW = "2001-06-30";

export const AGGREGATION_QUERY =
  "#measure_npa.data(avg(npa_ratio) BY Bank.bank_type FROM 2000-01-01 TO 2001-01-01)";

const QUARTER_ENDS = [
  "1999-03-31", "1999-06-30", "1999-09-30", "1999-12-31",
  "2000-03-31", "2000-06-30", "2000-09-30", "2000-12-31",
  "2001-03-31",
];

function nextDay(iso: string): string {
  const d = new Date(Date.parse(iso) + 86_400_000);
  return d.toISOString().slice(0, 10);
}

export interface WalkthroughContext {
  now: string;
  evaluationId?: string;
  actionId?: string;
  series?: SeriesPoint[];
}

export interface StepResult {
  summary: string;
  payload: unknown;
}

export interface WalkthroughStep {
  title: string;
  prefill: string;
  run(api: ApiClient, ctx: WalkthroughContext): Promise<StepResult>;
}

export interface Walkthrough {
  id: string;
  title: string;
  steps: WalkthroughStep[];
}

export const metadataToData: Walkthrough = {
  id: "metadata-to-data",
  title: "From metadata to data and back",
  steps: [
    {
      title: "locate the department",
      prefill: 'browse InternalEntity, name = "Banking Supervision Department"',
      run: async (api, ctx) => {
        const items = await api.concepts({
          kind: "InternalEntity",
          name: "Banking Supervision Department",
          asof: ctx.now,
        });
        return { summary: items.map((v) => v.logical_id).join(", "), payload: items };
      },
    },
    {
      title: "goals the department is responsible for",
      prefill: "dept_bsd → getGoals()",
      run: async (api, ctx) => {
        const ids = await api.navigate("dept_bsd", "getGoals", ctx.now);
        return { summary: ids.join(", "), payload: ids };
      },
    },
    {
      title: "measures behind the financial supervision goal",
      prefill: "goal_supervision → getMeasures()",
      run: async (api, ctx) => {
        const ids = await api.navigate("goal_supervision", "getMeasures", ctx.now);
        return { summary: ids.join(", "), payload: ids };
      },
    },
    {
      title: "fact table behind the NPA measure",
      prefill: "measure_npa → getFacts()",
      run: async (api, ctx) => {
        const target = await api.getFacts("measure_npa", ctx.now);
        return { summary: `${target.fact}.${target.column}`, payload: target };
      },
    },
    {
      title: "aggregate the measure by bank type",
      prefill: AGGREGATION_QUERY,
      run: async (api, ctx) => {
        const result = await api.navql(AGGREGATION_QUERY, ctx.now);
        return { summary: `${result.type} result`, payload: result };
      },
    },
    {
      title: "record the conclusion as an evaluation",
      prefill: "evaluation form on goal_supervision, provenance auto-attached",
      run: async (api, ctx) => {
        const created = await api.recordEvaluation({
          goal_id: "goal_supervision",
          measure_id: "measure_npa",
          text: "rural banks exceed the NPA tolerance",
          at: "2001-04-15",
          provenance: AGGREGATION_QUERY,
        });
        ctx.evaluationId = created.evaluation_id;
        return { summary: created.evaluation_id, payload: created };
      },
    },
    {
      title: "evaluations now attached to the goal",
      prefill: "goal_supervision → getEvaluation()",
      run: async (api, ctx) => {
        const ids = await api.navigate("goal_supervision", "getEvaluation", ctx.now);
        return { summary: ids.join(", "), payload: ids };
      },
    },
    {
      title: "other goals using the same measure",
      prefill: "measure_npa → getGoals()",
      run: async (api, ctx) => {
        const ids = await api.navigate("measure_npa", "getGoals", ctx.now);
        return { summary: ids.join(", "), payload: ids };
      },
    },
  ],
};

export const metadataEvolution: Walkthrough = {
  id: "metadata-evolution",
  title: "Metadata evolution",
  steps: [
    {
      title: "examine the NPA cube",
      prefill: "warehouse query: avg(npa_ratio) by bank_code",
      run: async (api, ctx) => {
        const table = await api.warehouseQuery({
          fact: "NPAQuarterly",
          where: [],
          group_by: [["Bank", "bank_code"]],
          agg: [["avg", "npa_ratio"]],
          time_range: null,
        });
        return { summary: `${table.rows.length} banks`, payload: table };
      },
    },
    {
      title: "measures recorded in the cube",
      prefill: "NPAQuarterly → measures",
      run: async (api, ctx) => {
        const ids = await api.factMeasures("NPAQuarterly", ctx.now);
        return { summary: ids.join(", "), payload: ids };
      },
    },
    {
      title: "goals evaluated through the measure",
      prefill: "measure_npa → getGoals()",
      run: async (api, ctx) => {
        const ids = await api.navigate("measure_npa", "getGoals", ctx.now);
        return { summary: ids.join(", "), payload: ids };
      },
    },
    {
      title: "NPA of XYZ Bank over time",
      prefill: "per-quarter warehouse queries, bank_code = XYZ",
      run: async (api, ctx) => {
        const series: SeriesPoint[] = [];
        for (const quarter of QUARTER_ENDS) {
          const point = await api.warehouseQuery({
            fact: "NPAQuarterly",
            where: [["Bank", "bank_code", "=", "XYZ"]],
            group_by: [],
            agg: [["avg", "npa_ratio"]],
            time_range: { valid_from: quarter, valid_to: nextDay(quarter) },
          });
          if (point.rows.length > 0) {
            series.push({ label: quarter, value: Number(point.rows[0][0]) });
          }
        }
        ctx.series = series;
        return { summary: `${series.length} quarters`, payload: series };
      },
    },
    {
      title: "metadata behind an XYZ data point",
      prefill: "view metadata on the (Bank, XYZ) row",
      run: async (api, ctx) => {
        const ids = await api.rowConcepts("Bank", "XYZ", ctx.now);
        return { summary: ids.join(", "), payload: ids };
      },
    },
    {
      title: "history of the NPA concept",
      prefill: "#npa → history()",
      run: async (api) => {
        const versions = await api.history("npa");
        return { summary: `${versions.length} versions`, payload: versions };
      },
    },
    {
      title: "history of XYZ Bank",
      prefill: "#xyz_bank → history()",
      run: async (api) => {
        const versions = await api.history("xyz_bank");
        return { summary: `${versions.length} versions`, payload: versions };
      },
    },
    {
      title: "events affecting XYZ Bank in the last 6 months",
      prefill: "xyz_bank → getAffectingEvents() DURING [2000-07-01, 2001-01-01)",
      run: async (api) => {
        const ids = await api.navigateDuring(
          "xyz_bank", "getAffectingEvents", "2000-07-01", "2001-01-01"
        );
        return { summary: ids.join(", "), payload: ids };
      },
    },
    {
      title: "record the follow-up action",
      prefill: "action form targeting (Bank, XYZ), caused by the recorded evaluation",
      run: async (api, ctx) => {
        let causes: string[];
        if (ctx.evaluationId) {
          causes = [ctx.evaluationId];
        } else {
          const evaluations = await api.concepts({ kind: "Evaluation", asof: ctx.now });
          causes = evaluations.map((v) => v.logical_id);
        }
        const created = await api.recordAction({
          evaluation_ids: causes,
          text: "reduce assets in equities",
          targets: [["Bank", "XYZ"]],
          at: "2001-05-01",
        });
        ctx.actionId = created.action_id;
        return { summary: created.action_id, payload: created };
      },
    },
  ],
};

export const WALKTHROUGHS: Walkthrough[] = [metadataToData, metadataEvolution];

export async function runWalkthrough(
  walkthrough: Walkthrough,
  api: ApiClient,
  ctx: WalkthroughContext,
  onStep?: (step: WalkthroughStep, result: StepResult, index: number) => void
): Promise<StepResult[]> {
  const results: StepResult[] = [];
  for (const [index, step] of walkthrough.steps.entries()) {
    const result = await step.run(api, ctx);
    results.push(result);
    onStep?.(step, result, index);
  }
  return results;
}
