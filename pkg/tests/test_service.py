from __future__ import annotations

from datetime import date

import pytest
from fastapi.testclient import TestClient

from metarepo import navql
from metarepo.errors import MetarepoError
from metarepo.fixtures import build_demo_repository
from metarepo.linkage import LinkKind, advertised_methods
from metarepo.model import AssociationKind, ConceptKind, ValidInterval
from metarepo.serialize import (
    canonical_json,
    encode_concept,
    encode_dim_row,
    encode_dimension_def,
    encode_fact_def,
    encode_query_result,
    export_repository,
)
from metarepo.service import _api_error, create_app

D = date
T = "2001-03-31"
NOW = D(2001, 6, 30)


def _expect_ok(compute):
    """Run the reference operation; mirror errors through the API mapping."""
    try:
        return 200, compute()
    except MetarepoError as exc:
        return _api_error(exc)


# The scripted call matrix: (request description, client call, reference
# computation over a twin repository). Entries run in order; mutations on the
# served repo are mirrored on the twin.
def call_matrix():
    return [
        ("list goals",
         lambda c: c.get(f"/concepts?kind=Goal&asof={T}"),
         lambda r: [encode_concept(v) for v in r.store.find_concepts(
             ConceptKind.GOAL, None, D(2001, 3, 31))]),
        ("list by name",
         lambda c: c.get(f"/concepts?name=Bank&asof={T}"),
         lambda r: [encode_concept(v) for v in r.store.find_concepts(
             None, "Bank", D(2001, 3, 31))]),
        ("list with default asof",
         lambda c: c.get("/concepts?kind=Measure"),
         lambda r: [encode_concept(v) for v in r.store.find_concepts(
             ConceptKind.MEASURE, None, r.max_known_date())]),
        ("unknown kind",
         lambda c: c.get("/concepts?kind=Widget"),
         None),
        ("get concept as of",
         lambda c: c.get("/concepts/npa?asof=1998-06-01"),
         lambda r: encode_concept(r.store.get_as_of("npa", D(1998, 6, 1)))),
        ("get concept before existence",
         lambda c: c.get("/concepts/npa?asof=1901-01-01"),
         None),
        ("history",
         lambda c: c.get("/concepts/npa/history"),
         lambda r: [encode_concept(v) for v in r.store.get_history("npa")]),
        ("history of unknown id",
         lambda c: c.get("/concepts/ghost/history"),
         lambda r: [encode_concept(v) for v in r.store.get_history("ghost")]),
        ("create concept",
         lambda c: c.post("/concepts", json={
             "kind": "Goal", "name": "stable exchange rate",
             "description": "", "valid_from": "2001-01-01"}),
         lambda r: {"logical_id": r.store.create_concept(
             ConceptKind.GOAL, "stable exchange rate", "", {}, D(2001, 1, 1))}),
        ("create with invalid attributes",
         lambda c: c.post("/concepts", json={
             "kind": "Goal", "name": "g", "attributes": {"x": "y"},
             "valid_from": "2001-01-01"}),
         lambda r: {"logical_id": r.store.create_concept(
             ConceptKind.GOAL, "g", "", {"x": "y"}, D(2001, 1, 1))}),
        ("update concept",
         lambda c: c.patch("/concepts/npa", json={
             "description": "tightened again", "effective_from": "2001-05-01"}),
         lambda r: {"version_no": r.store.update_concept(
             "npa", description="tightened again", effective_from=D(2001, 5, 1))}),
        ("retroactive update conflicts",
         lambda c: c.patch("/concepts/npa", json={
             "description": "x", "effective_from": "1990-01-01"}),
         lambda r: {"version_no": r.store.update_concept(
             "npa", description="x", effective_from=D(1990, 1, 1))}),
        ("retire concept",
         lambda c: c.delete("/concepts/goal_fraud?at=2001-06-01"),
         lambda r: r.store.retire_concept("goal_fraud", D(2001, 6, 1)) or {"ok": True}),
        ("retire twice conflicts",
         lambda c: c.delete("/concepts/goal_fraud?at=2001-07-01"),
         lambda r: r.store.retire_concept("goal_fraud", D(2001, 7, 1)) or {"ok": True}),
        ("navigate getGoals",
         lambda c: c.get(f"/concepts/dept_bsd/nav/getGoals?asof={T}"),
         lambda r: sorted(r.navigate("dept_bsd", "getGoals", D(2001, 3, 31)))),
        ("navigate reverse dispatch",
         lambda c: c.get(f"/concepts/measure_npa/nav/getGoals?asof={T}"),
         lambda r: sorted(r.navigate("measure_npa", "getGoals", D(2001, 3, 31)))),
        ("navigate during window",
         lambda c: c.get("/concepts/xyz_bank/nav/getAffectingEvents"
                         "?from=2000-07-01&to=2001-01-01"),
         lambda r: sorted(r.navigate_during(
             "xyz_bank", "getAffectingEvents",
             ValidInterval(D(2000, 7, 1), D(2001, 1, 1))))),
        ("navigate method/kind mismatch",
         lambda c: c.get(f"/concepts/goal_npa/nav/getProcesses?asof={T}"),
         lambda r: sorted(r.navigate("goal_npa", "getProcesses", D(2001, 3, 31)))),
        ("navigate unknown id",
         lambda c: c.get(f"/concepts/ghost/nav/getGoals?asof={T}"),
         lambda r: sorted(r.navigate("ghost", "getGoals", D(2001, 3, 31)))),
        ("getDimension hop",
         lambda c: c.get(f"/concepts/bank/nav/getDimension?asof={T}"),
         lambda r: (lambda pair: {"dimension": pair[0],
                                  "rows": [encode_dim_row(x) for x in pair[1]]})(
             r.get_dimension("bank", D(2001, 3, 31)))),
        ("getFacts hop",
         lambda c: c.get(f"/concepts/measure_income/nav/getFacts?asof={T}"),
         lambda r: (lambda pair: {"fact": pair[0], "column": pair[1]})(
             r.get_facts("measure_income", D(2001, 3, 31)))),
        ("history via nav",
         lambda c: c.get("/concepts/xyz_bank/nav/history"),
         lambda r: [encode_concept(v) for v in r.store.get_history("xyz_bank")]),
        ("create association",
         lambda c: c.post("/associations", json={
             "kind": "EGoal", "src": "dept_bsd", "dst": "goal_npa",
             "valid_from": "2001-01-01"}),
         lambda r: {"assoc_id": r.store.create_association(
             AssociationKind.E_GOAL, "dept_bsd", "goal_npa", D(2001, 1, 1))}),
        ("association endpoint mismatch",
         lambda c: c.post("/associations", json={
             "kind": "PGoal", "src": "goal_npa", "dst": "dept_bsd",
             "valid_from": "2001-01-01"}),
         lambda r: {"assoc_id": r.store.create_association(
             AssociationKind.P_GOAL, "goal_npa", "dept_bsd", D(2001, 1, 1))}),
        ("end association",
         lambda c: c.delete("/associations/asc_goal_fraud?at=2001-06-01"),
         lambda r: r.store.end_association("asc_goal_fraud", D(2001, 6, 1)) or {"ok": True}),
        ("create link",
         lambda c: c.post("/links", json={
             "kind": "ConceptDimRow", "concept_id": "bank_foreign",
             "dimension": "Bank", "key": "FRB", "valid_from": "2001-01-01"}),
         lambda r: {"link_id": r.link(
             LinkKind.CONCEPT_DIM_ROW, "bank_foreign", ("Bank", "FRB"), D(2001, 1, 1))}),
        ("link kind mismatch",
         lambda c: c.post("/links", json={
             "kind": "MeasureFact", "concept_id": "goal_npa",
             "fact": "NPAQuarterly", "column": "npa_ratio",
             "valid_from": "2001-01-01"}),
         lambda r: {"link_id": r.link(
             LinkKind.MEASURE_FACT, "goal_npa", ("NPAQuarterly", "npa_ratio"),
             D(2001, 1, 1))}),
        ("row to concepts",
         lambda c: c.get(f"/warehouse/dims/Bank/rows/SBN/concepts?asof={T}"),
         lambda r: sorted(r.row_to_concepts("Bank", "SBN", D(2001, 3, 31)))),
        ("fact to measures",
         lambda c: c.get(f"/warehouse/facts/NPAQuarterly/measures?asof={T}"),
         lambda r: sorted(r.fact_to_measures("NPAQuarterly", D(2001, 3, 31)))),
        ("row actions",
         lambda c: c.get(f"/warehouse/dims/Bank/rows/XYZ/actions?asof={T}"),
         lambda r: sorted(r.actions_targeting("Bank", "XYZ", D(2001, 3, 31)))),
        ("dimension defs",
         lambda c: c.get("/warehouse/dims"),
         lambda r: [encode_dimension_def(r.warehouse.dimensions[n])
                    for n in sorted(r.warehouse.dimensions)]),
        ("fact defs",
         lambda c: c.get("/warehouse/facts"),
         lambda r: [encode_fact_def(r.warehouse.facts[n])
                    for n in sorted(r.warehouse.facts)]),
        ("dimension rows as of",
         lambda c: c.get(f"/warehouse/dims/Bank/rows?asof={T}"),
         lambda r: [encode_dim_row(x) for x in r.warehouse.rows_as_of(
             "Bank", D(2001, 3, 31))]),
        ("warehouse query",
         lambda c: c.post("/warehouse/query", json={
             "fact": "NPAQuarterly",
             "where": [["Bank", "bank_type", "!=", "Foreign"]],
             "group_by": [["Bank", "bank_type"]],
             "agg": [["avg", "npa_ratio"], ["count", "npa_ratio"]],
             "time_range": {"valid_from": "2000-01-01", "valid_to": "2001-01-01"}}),
         lambda r: encode_query_result(
             r.warehouse.query_facts(
                 "NPAQuarterly",
                 where=[("Bank", "bank_type", "!=", "Foreign")],
                 group_by=[("Bank", "bank_type")],
                 agg=[("avg", "npa_ratio"), ("count", "npa_ratio")],
                 time_range=ValidInterval(D(2000, 1, 1), D(2001, 1, 1))))),
        ("warehouse query bad agg",
         lambda c: c.post("/warehouse/query", json={"fact": "NPAQuarterly", "agg": []}),
         lambda r: r.warehouse.query_facts("NPAQuarterly", agg=[])),
        ("navql set query",
         lambda c: c.post("/query", json={
             "q": 'InternalEntity(name="Banking Supervision Department")'
                  ".getGoals() ASOF 2001-03-31",
             "now": "2001-06-30"}),
         lambda r: navql.encode_result(navql.run(
             'InternalEntity(name="Banking Supervision Department")'
             ".getGoals() ASOF 2001-03-31", r, NOW))),
        ("navql history query",
         lambda c: c.post("/query", json={"q": "#npa.history()", "now": "2001-06-30"}),
         lambda r: navql.encode_result(navql.run("#npa.history()", r, NOW))),
        ("navql data query",
         lambda c: c.post("/query", json={
             "q": "#measure_npa.data(avg(npa_ratio) BY Bank.bank_type)",
             "now": "2001-06-30"}),
         lambda r: navql.encode_result(navql.run(
             "#measure_npa.data(avg(npa_ratio) BY Bank.bank_type)", r, NOW))),
        ("navql parse error",
         lambda c: c.post("/query", json={"q": "Goal(.getMeasures()", "now": "2001-06-30"}),
         lambda r: navql.encode_result(navql.run("Goal(.getMeasures()", r, NOW))),
        ("record evaluation",
         lambda c: c.post("/evaluations", json={
             "goal_id": "goal_supervision", "measure_id": "measure_npa",
             "text": "rural exposure too high", "at": "2001-04-15",
             "provenance": "#measure_npa.data(avg(npa_ratio))"}),
         lambda r: {"evaluation_id": r.record_evaluation(
             "goal_supervision", "measure_npa", "rural exposure too high",
             D(2001, 4, 15), provenance="#measure_npa.data(avg(npa_ratio))")}),
        ("record action",
         lambda c: c.post("/actions", json={
             "evaluation_ids": ["c3"], "text": "reduce assets in equities",
             "targets": [["Bank", "XYZ"], ["Bank", "RRB"]], "at": "2001-05-01"}),
         lambda r: (lambda rec: {
             "action_id": rec.action_id,
             "association_ids": list(rec.association_ids),
             "link_ids": list(rec.link_ids),
             "free_standing": rec.free_standing})(
             r.record_action(["c3"], "reduce assets in equities",
                             [("Bank", "XYZ"), ("Bank", "RRB")], D(2001, 5, 1)))),
        ("evaluation visible via navigation",
         lambda c: c.get("/concepts/goal_supervision/nav/getEvaluation?asof=2001-06-01"),
         lambda r: sorted(r.navigate("goal_supervision", "getEvaluation", D(2001, 6, 1)))),
    ]


def run_matrix(client, twin) -> int:
    """Drive every scripted call, asserting byte-level equivalence with the
    twin repository. Returns the number of calls made."""
    count = 0
    for description, do_call, compute in call_matrix():
        response = do_call(client)
        count += 1
        if description == "unknown kind":
            # no twin operation exists: the adapter itself must map this
            assert response.status_code == 400, description
            assert response.json()["code"] == "validation"
            continue
        if description == "get concept before existence":
            assert response.status_code == 404, description
            assert response.json()["code"] == "not_found"
            continue
        status, payload = _expect_ok(lambda: compute(twin))
        assert response.status_code == status, (description, response.content)
        assert response.content == canonical_json(payload), description
    return count


@pytest.fixture
def served():
    repo = build_demo_repository()
    twin = build_demo_repository()
    return TestClient(create_app(repo)), twin


def test_call_matrix_equivalence(served):
    client, twin = served
    assert run_matrix(client, twin) >= 30


def test_idempotent_reads(served):
    client, _ = served
    first = client.get("/concepts/npa/history")
    second = client.get("/concepts/npa/history")
    assert first.content == second.content


def test_method_table_matches_library(served):
    client, _ = served
    response = client.get("/nav/methods")
    assert response.json() == {
        kind.value: advertised_methods(kind) for kind in ConceptKind
    }


def test_cors_headers_present(served):
    client, _ = served
    response = client.get("/nav/methods", headers={"Origin": "http://localhost:5173"})
    assert response.headers.get("access-control-allow-origin") == "*"


def test_error_statuses():
    client = TestClient(create_app(build_demo_repository()))
    assert client.get("/concepts/ghost/history").status_code == 404
    assert client.patch("/concepts/npa", json={
        "description": "x", "effective_from": "1990-01-01"}).status_code == 409
    assert client.post("/query", json={"q": "Goal(."}).status_code == 400
    body = client.post("/query", json={"q": "Goal(."}).json()
    assert body["code"] == "parse_error"
    assert "offset" in body["detail"]


def test_writes_persist_to_store_path(tmp_path):
    repo = build_demo_repository()
    path = tmp_path / "store.ndjson"
    path.write_bytes(export_repository(repo))
    client = TestClient(create_app(repo, store_path=str(path)))
    response = client.post("/concepts", json={
        "kind": "Goal", "name": "persisted", "valid_from": "2001-01-01"})
    assert response.status_code == 200
    assert b"persisted" in path.read_bytes()
