"""Bundled central-bank demo dataset.

A small supervisory-bank world: a bank hierarchy with one re-typed bank, a
glossary concept whose definition changes, department goals and measures
wired to quarterly warehouse facts, and a merger event. Both guided
scenarios and the seeded CLI/service demos run against this repository.
"""

from __future__ import annotations

from datetime import date

from .linkage import LinkKind, Repository
from .model import AssociationKind, ConceptKind
from .warehouse import DimensionDef, FactDef, FactRow

QUARTER_ENDS = [
    date(1999, 3, 31), date(1999, 6, 30), date(1999, 9, 30), date(1999, 12, 31),
    date(2000, 3, 31), date(2000, 6, 30), date(2000, 9, 30), date(2000, 12, 31),
    date(2001, 3, 31),
]

NPA_RATIOS = {
    "XYZ": [8.0, 8.5, 9.0, 9.5, 10.0, 11.0, 12.0, 13.0, 14.0],
    "SBN": [4.0, 4.0, 4.0, 4.0, 4.5, 4.5, 4.5, 4.5, 5.0],
    "RRB": [10.0, 10.0, 10.0, 10.0, 12.0, 12.0, 12.0, 12.0, 13.0],
    "FRB": [2.0, 2.0, 2.0, 2.0, 2.5, 2.5, 2.5, 2.5, 3.0],
}

INTEREST_INCOME = {
    "XYZ": [50.0 + 2.5 * i for i in range(9)],
    "SBN": [120.0 + 5.0 * i for i in range(9)],
    "RRB": [30.0 + 1.5 * i for i in range(9)],
    "FRB": [80.0 + 2.0 * i for i in range(9)],
}

RETYPE_DATE = date(2000, 10, 1)
NPA_CHANGE_DATE = date(2000, 7, 1)
MERGER_DATE = date(2000, 11, 15)


def build_demo_repository() -> Repository:
    repo = Repository()
    store = repo.store
    d1997 = date(1997, 1, 1)
    d1998 = date(1998, 1, 1)
    d1999 = date(1999, 1, 1)

    # organization, entities, glossary
    store.create_concept(
        ConceptKind.INTERNAL_ENTITY, "Banking Supervision Department",
        "supervises commercial banks", {}, d1998, logical_id="dept_bsd",
    )
    store.create_concept(
        ConceptKind.EXTERNAL_ENTITY, "Bank",
        "a commercial bank reporting to the central bank", {}, d1997,
        logical_id="bank",
    )
    for suffix, name in (
        ("foreign", "Foreign Bank"),
        ("nationalized", "Nationalized Bank"),
        ("rural", "Rural Bank"),
    ):
        store.create_concept(
            ConceptKind.EXTERNAL_ENTITY, name, f"banks classified as {name.lower()}s",
            {}, d1998, logical_id=f"bank_{suffix}",
        )
    store.create_concept(
        ConceptKind.EXTERNAL_ENTITY, "XYZ Bank", "a mid-size bank",
        {"bank_code": "XYZ", "bank_type": "Rural"}, d1998, logical_id="xyz_bank",
    )
    store.update_concept(
        "xyz_bank",
        attributes={"bank_code": "XYZ", "bank_type": "Nationalized"},
        effective_from=RETYPE_DATE,
    )
    store.create_concept(
        ConceptKind.BUSINESS_CONCEPT, "non-performing asset (NPA)",
        "a loan whose payments are overdue by more than 180 days",
        {}, date(1997, 4, 1), logical_id="npa",
    )
    store.update_concept(
        "npa",
        description="a loan whose payments are overdue by more than 90 days",
        effective_from=NPA_CHANGE_DATE,
    )

    # goals and measures
    store.create_concept(
        ConceptKind.GOAL, "fraud detection", "detect fraudulent reporting",
        {}, d1999, logical_id="goal_fraud",
    )
    store.create_concept(
        ConceptKind.GOAL, "financial supervision", "keep the banking sector sound",
        {}, d1999, logical_id="goal_supervision",
    )
    store.create_concept(
        ConceptKind.GOAL, "NPA below 10% of gross assets",
        "keep non-performing assets under the tolerance", {}, d1999,
        logical_id="goal_npa",
    )
    store.create_concept(
        ConceptKind.MEASURE, "NPA Ratio",
        "non-performing assets as a percentage of gross assets, per quarter",
        {}, d1999, logical_id="measure_npa",
    )
    store.create_concept(
        ConceptKind.MEASURE, "Income Interest",
        "interest income recorded for every quarter for every bank",
        {}, d1999, logical_id="measure_income",
    )
    store.create_concept(
        ConceptKind.EXTERNAL_EVENT, "Merger of two banks",
        "XYZ Bank acquired another bank", {}, MERGER_DATE, logical_id="evt_merger",
    )

    # associations
    A = AssociationKind
    store.create_association(A.SUB_ENTITY, "bank", "bank_foreign", d1998,
                             assoc_id="asc_sub_foreign")
    store.create_association(A.SUB_ENTITY, "bank", "bank_nationalized", d1998,
                             assoc_id="asc_sub_nationalized")
    store.create_association(A.SUB_ENTITY, "bank", "bank_rural", d1998,
                             assoc_id="asc_sub_rural")
    store.create_association(A.SUB_ENTITY, "bank_rural", "xyz_bank", d1998,
                             assoc_id="asc_sub_xyz_rural")
    store.end_association("asc_sub_xyz_rural", RETYPE_DATE)
    store.create_association(A.SUB_ENTITY, "bank_nationalized", "xyz_bank",
                             RETYPE_DATE, assoc_id="asc_sub_xyz_nationalized")
    store.create_association(A.E_GOAL, "dept_bsd", "goal_fraud", d1999,
                             assoc_id="asc_goal_fraud")
    store.create_association(A.E_GOAL, "dept_bsd", "goal_supervision", d1999,
                             assoc_id="asc_goal_supervision")
    store.create_association(A.SUB_GOAL, "goal_supervision", "goal_npa", d1999,
                             assoc_id="asc_subgoal_npa")
    store.create_association(A.GOAL_MEASURE, "goal_supervision", "measure_npa",
                             d1999, assoc_id="asc_gm_supervision_npa")
    store.create_association(A.GOAL_MEASURE, "goal_supervision", "measure_income",
                             d1999, assoc_id="asc_gm_supervision_income")
    store.create_association(A.GOAL_MEASURE, "goal_npa", "measure_npa", d1999,
                             assoc_id="asc_gm_npa")
    store.create_association(A.EVENT_IMPACTS, "evt_merger", "xyz_bank",
                             MERGER_DATE, assoc_id="asc_impact_merger_xyz")

    # warehouse
    wh = repo.warehouse
    wh.define_dimension(
        DimensionDef(name="Bank", key_attr="bank_code",
                     attrs=("bank_code", "name", "bank_type"))
    )
    wh.upsert_dim_row("Bank", "FRB",
                      {"bank_code": "FRB", "name": "First Overseas Bank",
                       "bank_type": "Foreign"}, d1998)
    wh.upsert_dim_row("Bank", "SBN",
                      {"bank_code": "SBN", "name": "State Bank National",
                       "bank_type": "Nationalized"}, d1998)
    wh.upsert_dim_row("Bank", "RRB",
                      {"bank_code": "RRB", "name": "Rural Regional Bank",
                       "bank_type": "Rural"}, d1998)
    wh.upsert_dim_row("Bank", "XYZ",
                      {"bank_code": "XYZ", "name": "XYZ Bank",
                       "bank_type": "Rural"}, d1998)
    wh.upsert_dim_row("Bank", "XYZ",
                      {"bank_code": "XYZ", "name": "XYZ Bank",
                       "bank_type": "Nationalized"}, RETYPE_DATE)
    wh.define_fact(FactDef(name="NPAQuarterly", dims=("Bank",), measures=("npa_ratio",)))
    wh.define_fact(FactDef(name="IncomeFact", dims=("Bank",), measures=("interest_income",)))
    wh.insert_facts([
        FactRow(fact="NPAQuarterly", dim_keys={"Bank": code}, t=t,
                values={"npa_ratio": value})
        for code, series in sorted(NPA_RATIOS.items())
        for t, value in zip(QUARTER_ENDS, series)
    ])
    wh.insert_facts([
        FactRow(fact="IncomeFact", dim_keys={"Bank": code}, t=t,
                values={"interest_income": value})
        for code, series in sorted(INTEREST_INCOME.items())
        for t, value in zip(QUARTER_ENDS, series)
    ])

    # cross-links
    repo.link(LinkKind.CONCEPT_DIMENSION, "bank", "Bank", d1998, link_id="xl_bank_dim")
    repo.link(LinkKind.CONCEPT_DIM_ROW, "bank_foreign", ("Bank", "FRB"), d1998,
              link_id="xl_row_frb")
    repo.link(LinkKind.CONCEPT_DIM_ROW, "bank_nationalized", ("Bank", "SBN"), d1998,
              link_id="xl_row_sbn")
    repo.link(LinkKind.CONCEPT_DIM_ROW, "bank_rural", ("Bank", "RRB"), d1998,
              link_id="xl_row_rrb")
    repo.link(LinkKind.CONCEPT_DIM_ROW, "xyz_bank", ("Bank", "XYZ"), d1998,
              link_id="xl_row_xyz")
    repo.link(LinkKind.MEASURE_FACT, "measure_npa", ("NPAQuarterly", "npa_ratio"),
              d1999, link_id="xl_fact_npa")
    repo.link(LinkKind.MEASURE_FACT, "measure_income", ("IncomeFact", "interest_income"),
              d1999, link_id="xl_fact_income")
    return repo
