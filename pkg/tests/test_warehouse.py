from __future__ import annotations

import random
from datetime import date

import pytest

from metarepo.errors import ConflictError, NotFoundError, QueryError, ValidationError
from metarepo.model import ValidInterval
from metarepo.warehouse import DimensionDef, FactDef, FactRow, Warehouse

from oracles import query_facts_brute
from randgen import rand_date, random_warehouse

D = date

BANK_DIM = DimensionDef(name="Bank", key_attr="bank_code",
                        attrs=("bank_code", "name", "bank_type"))
NPA_FACT = FactDef(name="NPAQuarterly", dims=("Bank",), measures=("npa_ratio",))


@pytest.fixture
def wh():
    out = Warehouse()
    out.define_dimension(BANK_DIM)
    out.define_fact(NPA_FACT)
    return out


def _bank(wh, code, bank_type, start):
    wh.upsert_dim_row("Bank", code,
                      {"bank_code": code, "name": f"{code} Bank", "bank_type": bank_type},
                      start)


class TestSchema:
    def test_definitions_accepted(self, wh):
        assert "Bank" in wh.dimensions
        assert "NPAQuarterly" in wh.facts

    def test_duplicate_dimension_rejected(self, wh):
        with pytest.raises(ConflictError):
            wh.define_dimension(BANK_DIM)

    def test_fact_with_unknown_dimension_rejected(self, wh):
        with pytest.raises(NotFoundError):
            wh.define_fact(FactDef(name="F", dims=("Ghost",), measures=("m",)))

    def test_key_attr_must_be_listed(self, wh):
        with pytest.raises(ValidationError):
            wh.define_dimension(DimensionDef(name="X", key_attr="k", attrs=("a",)))


class TestDimRows:
    def test_new_key_is_single_open_version(self, wh):
        _bank(wh, "XYZ", "Rural", D(1998, 1, 1))
        (version,) = wh.dim_rows["Bank"]["XYZ"]
        assert version.interval == ValidInterval(D(1998, 1, 1), None)

    def test_reupsert_closes_and_appends(self, wh):
        _bank(wh, "XYZ", "Rural", D(1998, 1, 1))
        _bank(wh, "XYZ", "Nationalized", D(2000, 10, 1))
        v1, v2 = wh.dim_rows["Bank"]["XYZ"]
        assert v1.interval.valid_to == D(2000, 10, 1)
        assert v2.interval.is_open
        assert v2.attrs["bank_type"] == "Nationalized"

    def test_retroactive_upsert_rejected(self, wh):
        _bank(wh, "XYZ", "Rural", D(2000, 1, 1))
        with pytest.raises(ConflictError):
            _bank(wh, "XYZ", "Urban", D(1999, 1, 1))

    def test_unknown_attr_rejected(self, wh):
        with pytest.raises(ValidationError):
            wh.upsert_dim_row("Bank", "XYZ", {"bank_code": "XYZ", "ghost": 1}, D(2000, 1, 1))

    def test_random_upsert_sequences_keep_chain_invariants(self):
        rng = random.Random(5)
        for _ in range(20):
            wh, _ = random_warehouse(rng, max_rows=10)
            assert wh.check_invariants() == []


class TestInsertFacts:
    def test_single_row(self, wh):
        _bank(wh, "XYZ", "Rural", D(1998, 1, 1))
        count = wh.insert_facts([FactRow(
            fact="NPAQuarterly", dim_keys={"Bank": "XYZ"},
            t=D(1999, 3, 31), values={"npa_ratio": 8.0},
        )])
        assert count == 1

    def test_duplicate_coordinate_names_it(self, wh):
        _bank(wh, "XYZ", "Rural", D(1998, 1, 1))
        row = FactRow(fact="NPAQuarterly", dim_keys={"Bank": "XYZ"},
                      t=D(1999, 3, 31), values={"npa_ratio": 8.0})
        wh.insert_facts([row])
        with pytest.raises(ConflictError, match="XYZ.*1999-03-31"):
            wh.insert_facts([row])

    def test_unknown_dimension_key_rejected(self, wh):
        with pytest.raises(ValidationError, match="no row with key"):
            wh.insert_facts([FactRow(
                fact="NPAQuarterly", dim_keys={"Bank": "GHOST"},
                t=D(1999, 3, 31), values={"npa_ratio": 8.0},
            )])

    def test_unknown_fact_rejected(self, wh):
        with pytest.raises(NotFoundError):
            wh.insert_facts([FactRow(fact="Ghost", dim_keys={}, t=D(1999, 1, 1), values={})])


class TestQueryFacts:
    def _populate(self, wh):
        _bank(wh, "XYZ", "Rural", D(1998, 1, 1))
        _bank(wh, "XYZ", "Nationalized", D(2000, 10, 1))
        _bank(wh, "SBN", "Nationalized", D(1998, 1, 1))
        # two XYZ facts before the re-type, one after, two for SBN
        wh.insert_facts([
            FactRow(fact="NPAQuarterly", dim_keys={"Bank": code}, t=t,
                    values={"npa_ratio": value})
            for code, t, value in [
                ("XYZ", D(2000, 3, 31), 10.0),
                ("XYZ", D(2000, 9, 30), 12.0),
                ("XYZ", D(2000, 12, 31), 13.0),
                ("SBN", D(2000, 3, 31), 4.5),
                ("SBN", D(2000, 12, 31), 4.5),
            ]
        ])

    def test_single_row_echoes_value(self, wh):
        _bank(wh, "XYZ", "Rural", D(1998, 1, 1))
        wh.insert_facts([FactRow(fact="NPAQuarterly", dim_keys={"Bank": "XYZ"},
                                 t=D(1999, 3, 31), values={"npa_ratio": 8.0})])
        result = wh.query_facts("NPAQuarterly", agg=[("sum", "npa_ratio")])
        assert result.columns == ("sum(npa_ratio)",)
        assert result.rows == ((8.0,),)

    def test_partition_identity(self, wh):
        self._populate(wh)
        total = wh.query_facts("NPAQuarterly", agg=[("sum", "npa_ratio")])
        grouped = wh.query_facts(
            "NPAQuarterly", group_by=[("Bank", "bank_type")], agg=[("sum", "npa_ratio")],
        )
        assert sum(row[-1] for row in grouped.rows) == pytest.approx(
            total.rows[0][0], rel=1e-12
        )

    def test_scd_retype_splits_groups(self, wh):
        # Facts dated before the re-type join the old attribute value,
        # later facts the new one; checked against the nested-loop oracle.
        self._populate(wh)
        result = wh.query_facts(
            "NPAQuarterly", group_by=[("Bank", "bank_type")],
            agg=[("sum", "npa_ratio"), ("count", "npa_ratio")],
        )
        expected_cols, expected_rows = query_facts_brute(
            wh, "NPAQuarterly", group_by=[("Bank", "bank_type")],
            agg=[("sum", "npa_ratio"), ("count", "npa_ratio")],
        )
        assert result.columns == expected_cols
        assert result.rows == expected_rows
        by_type = {row[0]: row for row in result.rows}
        assert by_type["Rural"][2] == 2          # the two pre-retype XYZ facts
        assert by_type["Nationalized"][2] == 3   # SBN's two plus re-typed XYZ

    def test_dim_as_of_override_uses_current_labels(self, wh):
        self._populate(wh)
        result = wh.query_facts(
            "NPAQuarterly", group_by=[("Bank", "bank_type")],
            agg=[("count", "npa_ratio")], dim_as_of=D(2001, 1, 1),
        )
        assert result.rows == (("Nationalized", 5),)

    def test_empty_agg_rejected(self, wh):
        with pytest.raises(QueryError):
            wh.query_facts("NPAQuarterly", agg=[])

    def test_unknown_fact_and_attr(self, wh):
        with pytest.raises(NotFoundError):
            wh.query_facts("Ghost", agg=[("sum", "x")])
        with pytest.raises(QueryError):
            wh.query_facts("NPAQuarterly", agg=[("sum", "ghost_col")])
        with pytest.raises(QueryError):
            wh.query_facts("NPAQuarterly", agg=[("sum", "npa_ratio")],
                           where=[("Bank", "ghost", "=", 1)])

    def test_time_range_is_half_open(self, wh):
        _bank(wh, "XYZ", "Rural", D(1998, 1, 1))
        wh.insert_facts([
            FactRow(fact="NPAQuarterly", dim_keys={"Bank": "XYZ"},
                    t=D(2000, 3, 31), values={"npa_ratio": 1.0}),
            FactRow(fact="NPAQuarterly", dim_keys={"Bank": "XYZ"},
                    t=D(2000, 6, 30), values={"npa_ratio": 2.0}),
        ])
        result = wh.query_facts(
            "NPAQuarterly", agg=[("count", "npa_ratio")],
            time_range=ValidInterval(D(2000, 3, 31), D(2000, 6, 30)),
        )
        assert result.rows == ((1,),)


def _random_query(rng, wh, fact):
    definition = wh.facts[fact]
    dims = definition.dims
    where = []
    for _ in range(rng.randrange(3)):
        dimension = rng.choice(dims)
        attr = rng.choice(("p", "q"))
        op = rng.choice(("=", "!=", "<", "<=", ">", ">="))
        value = rng.choice(["red", "green", "blue"]) if attr == "p" else rng.randrange(10)
        where.append((dimension, attr, op, value))
    group_by = []
    for _ in range(rng.randrange(3)):
        group_by.append((rng.choice(dims), rng.choice(("k", "p", "q"))))
    agg = [(rng.choice(("sum", "avg", "min", "max", "count")), rng.choice(definition.measures))
           for _ in range(rng.randint(1, 3))]
    time_range = None
    if rng.random() < 0.4:
        lo = rand_date(rng)
        time_range = ValidInterval(lo, rand_date(rng, 900) if rng.random() < 0.5 else None)
        if time_range.valid_to is not None and time_range.valid_to <= time_range.valid_from:
            time_range = ValidInterval(time_range.valid_to, time_range.valid_from)
    dim_as_of = rand_date(rng) if rng.random() < 0.3 else None
    return dict(where=where, group_by=group_by, agg=agg,
                time_range=time_range, dim_as_of=dim_as_of)


def test_random_queries_match_nested_loop_oracle():
    rng = random.Random(2024)
    for _ in range(25):
        wh, fact = random_warehouse(rng, max_rows=200)
        for _ in range(8):
            spec = _random_query(rng, wh, fact)
            result = wh.query_facts(fact, **spec)
            expected_cols, expected_rows = query_facts_brute(wh, fact, **spec)
            assert result.columns == expected_cols
            assert result.rows == expected_rows


def test_aggregate_identities_on_random_warehouses():
    rng = random.Random(77)
    for _ in range(10):
        wh, fact = random_warehouse(rng, max_rows=200)
        measures = wh.facts[fact].measures
        group_by = [("D0", "p")]
        agg = [("sum", measures[0]), ("avg", measures[0]), ("count", measures[0])]
        result = wh.query_facts(fact, group_by=group_by, agg=agg)
        total = wh.query_facts(fact, agg=[("count", measures[0])])
        assert sum(row[-1] for row in result.rows) == total.rows[0][0]
        for row in result.rows:
            _, total_sum, mean, count = row
            assert abs(mean * count - total_sum) <= 1e-9 * max(1.0, abs(total_sum))
