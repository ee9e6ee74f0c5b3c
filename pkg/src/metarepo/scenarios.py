"""Scripted walkthroughs over the demo dataset.

Each scenario is a sequence of repository operations; every step returns a
JSON-able dict so the replays can be run from a script, asserted against
frozen expectations, or mirrored in the web navigator.
"""

from __future__ import annotations

from datetime import date, timedelta

from . import navql
from .fixtures import QUARTER_ENDS
from .linkage import Repository
from .model import ConceptKind, ValidInterval
from .serialize import encode_query_result

DEMO_NOW = date(2001, 6, 30)

AGGREGATION_QUERY = (
    "#measure_npa.data(avg(npa_ratio) BY Bank.bank_type "
    "FROM 2000-01-01 TO 2001-01-01)"
)

EVENT_WINDOW = ValidInterval(date(2000, 7, 1), date(2001, 1, 1))


def scenario_metadata_to_data(repo: Repository, now: date = DEMO_NOW) -> list[dict]:
    """Walk from a department through its goals and measures to warehouse
    data, record the conclusion as an evaluation, and find it again."""
    steps = []
    department = repo.store.find_concepts(
        ConceptKind.INTERNAL_ENTITY, "Banking Supervision Department", now
    )
    dept_id = department[0].logical_id
    steps.append({
        "step": "locate the department",
        "result": [v.logical_id for v in department],
    })
    steps.append({
        "step": "goals the department is responsible for",
        "result": sorted(repo.navigate(dept_id, "getGoals", now)),
    })
    steps.append({
        "step": "measures behind the financial supervision goal",
        "result": sorted(repo.navigate("goal_supervision", "getMeasures", now)),
    })
    steps.append({
        "step": "fact table behind the NPA measure",
        "result": list(repo.get_facts("measure_npa", now)),
    })
    table = navql.run(AGGREGATION_QUERY, repo, now)
    steps.append({
        "step": "aggregate the measure by bank type",
        "query": AGGREGATION_QUERY,
        "result": encode_query_result(table),
    })
    evaluation_id = repo.record_evaluation(
        "goal_supervision",
        "measure_npa",
        "rural banks exceed the NPA tolerance",
        date(2001, 4, 15),
        provenance=AGGREGATION_QUERY,
    )
    steps.append({"step": "record the conclusion as an evaluation",
                  "result": [evaluation_id]})
    steps.append({
        "step": "evaluations now attached to the goal",
        "result": sorted(repo.navigate("goal_supervision", "getEvaluation", now)),
    })
    steps.append({
        "step": "other goals using the same measure",
        "result": sorted(repo.navigate("measure_npa", "getGoals", now)),
    })
    return steps


def scenario_metadata_evolution(repo: Repository, now: date = DEMO_NOW) -> list[dict]:
    """Walk from cube data back to its metadata and inspect how the NPA
    definition, a bank's attributes, and affecting events evolved."""
    steps = []
    overview = repo.warehouse.query_facts(
        "NPAQuarterly",
        group_by=[("Bank", "bank_code")],
        agg=[("avg", "npa_ratio")],
    )
    steps.append({"step": "examine the NPA cube", "result": encode_query_result(overview)})
    steps.append({
        "step": "measures recorded in the cube",
        "result": sorted(repo.fact_to_measures("NPAQuarterly", now)),
    })
    steps.append({
        "step": "goals evaluated through the measure",
        "result": sorted(repo.navigate("measure_npa", "getGoals", now)),
    })
    series = []
    for quarter_end in QUARTER_ENDS:
        window = ValidInterval(quarter_end, quarter_end + timedelta(days=1))
        point = repo.warehouse.query_facts(
            "NPAQuarterly",
            where=[("Bank", "bank_code", "=", "XYZ")],
            agg=[("avg", "npa_ratio")],
            time_range=window,
        )
        if point.rows:
            series.append([quarter_end.isoformat(), point.rows[0][0]])
    steps.append({"step": "NPA of XYZ Bank over time", "result": series})
    steps.append({
        "step": "metadata behind an XYZ data point",
        "result": sorted(repo.row_to_concepts("Bank", "XYZ", now)),
    })
    npa_history = repo.store.get_history("npa")
    steps.append({
        "step": "history of the NPA concept",
        "result": [
            [v.version_no, v.interval.valid_from.isoformat(), v.description]
            for v in npa_history
        ],
    })
    bank_history = repo.store.get_history("xyz_bank")
    steps.append({
        "step": "history of XYZ Bank",
        "result": [
            [v.version_no, v.interval.valid_from.isoformat(),
             str(v.attributes.get("bank_type"))]
            for v in bank_history
        ],
    })
    steps.append({
        "step": "events affecting XYZ Bank in the window",
        "window": [EVENT_WINDOW.valid_from.isoformat(), EVENT_WINDOW.valid_to.isoformat()],
        "result": sorted(
            repo.navigate_during("xyz_bank", "getAffectingEvents", EVENT_WINDOW)
        ),
    })
    return steps
