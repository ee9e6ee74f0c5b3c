"""Seedable random builders for stores, graphs, and warehouses."""

from __future__ import annotations

import random
from datetime import date, timedelta

from metarepo.linkage import LinkKind, Repository
from metarepo.model import (
    ASSOCIATION_ENDPOINTS,
    AssociationKind,
    ConceptKind,
    ENTITY_KINDS,
    ValidInterval,
)
from metarepo.store import Store
from metarepo.warehouse import DimensionDef, FactDef, FactRow, Warehouse

BASE = date(2000, 1, 1)
KINDS = list(ConceptKind)
ATTR_POOL = ["x", "y", "z", 7, 2.5, date(2001, 6, 1)]


def rand_date(rng: random.Random, span_days: int = 2000) -> date:
    return BASE + timedelta(days=rng.randrange(span_days))


def random_concept_ops(rng: random.Random, n_ops: int) -> tuple[Store, list[tuple]]:
    """Apply a random legal create/update/retire sequence; return the store
    and the op log for independent replay."""
    store = Store()
    log: list[tuple] = []
    latest_from: dict[str, date] = {}
    live: list[str] = []
    for _ in range(n_ops):
        action = "create"
        if live:
            action = rng.choice(["create", "update", "update", "retire"])
        if action == "create":
            kind = rng.choice(KINDS)
            attrs = {}
            if kind in ENTITY_KINDS and rng.random() < 0.5:
                attrs = {f"a{rng.randrange(3)}": rng.choice(ATTR_POOL)}
            valid_from = rand_date(rng)
            name = f"name{rng.randrange(1000)}"
            description = f"desc{rng.randrange(1000)}"
            logical_id = store.create_concept(kind, name, description, attrs, valid_from)
            log.append(("create", logical_id, kind, name, description, attrs, valid_from))
            latest_from[logical_id] = valid_from
            live.append(logical_id)
        elif action == "update":
            logical_id = rng.choice(live)
            effective = latest_from[logical_id] + timedelta(days=rng.randint(1, 120))
            name = f"name{rng.randrange(1000)}" if rng.random() < 0.5 else None
            description = f"desc{rng.randrange(1000)}" if rng.random() < 0.5 else None
            attributes = None
            if store.kind_of(logical_id) in ENTITY_KINDS and rng.random() < 0.3:
                attributes = {f"a{rng.randrange(3)}": rng.choice(ATTR_POOL)}
            store.update_concept(
                logical_id, name=name, description=description,
                attributes=attributes, effective_from=effective,
            )
            log.append(("update", logical_id, name, description, attributes, effective))
            latest_from[logical_id] = effective
        else:
            logical_id = rng.choice(live)
            at = latest_from[logical_id] + timedelta(days=rng.randint(1, 120))
            store.retire_concept(logical_id, at)
            log.append(("retire", logical_id, at))
            live.remove(logical_id)
    return store, log


def random_graph_store(
    rng: random.Random, max_concepts: int = 60, max_assocs: int = 240
) -> Store:
    """A store with random kinds, version chains, and typed associations."""
    store = Store()
    by_kind: dict[ConceptKind, list[str]] = {k: [] for k in ConceptKind}
    n_concepts = rng.randint(5, max_concepts)
    for _ in range(n_concepts):
        kind = rng.choice(KINDS)
        valid_from = rand_date(rng)
        logical_id = store.create_concept(
            kind, f"name{rng.randrange(1000)}", "", {}, valid_from
        )
        latest = valid_from
        if rng.random() < 0.35:
            latest += timedelta(days=rng.randint(1, 200))
            store.update_concept(
                logical_id, description=f"d{rng.randrange(100)}", effective_from=latest
            )
        if rng.random() < 0.2:
            store.retire_concept(logical_id, latest + timedelta(days=rng.randint(1, 200)))
        by_kind[kind].append(logical_id)

    assoc_kinds = list(AssociationKind)
    created = 0
    for _ in range(max_assocs * 2):
        if created >= max_assocs:
            break
        kind = rng.choice(assoc_kinds)
        src_ok, dst_ok = ASSOCIATION_ENDPOINTS[kind]
        src_pool = [i for k in src_ok for i in by_kind[k]]
        dst_pool = [i for k in dst_ok for i in by_kind[k]]
        if not src_pool or not dst_pool:
            continue
        valid_from = rand_date(rng)
        assoc_id = store.create_association(
            kind, rng.choice(src_pool), rng.choice(dst_pool), valid_from
        )
        if rng.random() < 0.3:
            store.end_association(assoc_id, valid_from + timedelta(days=rng.randint(1, 300)))
        created += 1
    return store


def random_warehouse(
    rng: random.Random, max_rows: int = 400, ensure_retype: bool = True,
    min_rows: int = 10,
) -> tuple[Warehouse, str]:
    """A warehouse with SCD dimension chains and one fact table; returns
    (warehouse, fact name). Guarantees a re-typed key when asked."""
    wh = Warehouse()
    n_dims = rng.randint(1, 2)
    dims = []
    for d in range(n_dims):
        name = f"D{d}"
        attrs = ("k", "p", "q")
        wh.define_dimension(DimensionDef(name=name, key_attr="k", attrs=attrs))
        dims.append(name)
        for i in range(rng.randint(3, 8)):
            key = f"{name}key{i}"
            start = rand_date(rng, 800)
            versions = rng.randint(1, 3)
            for v in range(versions):
                wh.upsert_dim_row(
                    name, key,
                    {"k": key, "p": rng.choice(["red", "green", "blue"]),
                     "q": rng.randrange(10)},
                    start,
                )
                start += timedelta(days=rng.randint(30, 400))
        if ensure_retype and d == 0:
            wh.upsert_dim_row(name, "retyped",
                              {"k": "retyped", "p": "red", "q": 1}, BASE)
            wh.upsert_dim_row(name, "retyped",
                              {"k": "retyped", "p": "blue", "q": 2},
                              BASE + timedelta(days=500))

    measures = tuple(f"m{i}" for i in range(rng.randint(1, 3)))
    fact = "F"
    wh.define_fact(FactDef(name=fact, dims=tuple(dims), measures=measures))
    rows = []
    seen = set()
    for _ in range(rng.randint(min_rows, max_rows)):
        keys = {d: rng.choice(sorted(wh.dim_rows[d])) for d in dims}
        t = rand_date(rng)
        coordinate = (tuple(sorted(keys.items())), t)
        if coordinate in seen:
            continue
        seen.add(coordinate)
        rows.append(FactRow(
            fact=fact, dim_keys=keys, t=t,
            values={m: round(rng.uniform(-50, 150), 6) for m in measures},
        ))
    if ensure_retype:
        for offset in (100, 900):
            t = BASE + timedelta(days=offset)
            keys = {d: ("retyped" if d == "D0" else sorted(wh.dim_rows[d])[0]) for d in dims}
            coordinate = (tuple(sorted(keys.items())), t)
            if coordinate not in seen:
                seen.add(coordinate)
                rows.append(FactRow(
                    fact=fact, dim_keys=keys, t=t,
                    values={m: float(offset) for m in measures},
                ))
    wh.insert_facts(rows)
    return wh, fact


def random_linked_repo(rng: random.Random) -> Repository:
    """A repository whose graph, warehouse, and measure links are all wired,
    for end-to-end query evaluation tests."""
    repo = Repository()
    repo.store = random_graph_store(rng, max_concepts=40, max_assocs=120)
    wh, fact = random_warehouse(rng, max_rows=120, ensure_retype=False)
    repo.warehouse = wh
    measures = repo.store.ids_of_kind(ConceptKind.MEASURE)
    fact_def = wh.facts[fact]
    for measure_id in measures:
        if rng.random() < 0.7:
            repo.link(
                LinkKind.MEASURE_FACT, measure_id,
                (fact, rng.choice(fact_def.measures)), rand_date(rng, 400),
            )
    for kind in ENTITY_KINDS:
        for entity_id in repo.store.ids_of_kind(kind):
            if rng.random() < 0.3:
                repo.link(
                    LinkKind.CONCEPT_DIMENSION, entity_id,
                    rng.choice(sorted(wh.dimensions)), rand_date(rng, 400),
                )
            elif rng.random() < 0.3:
                dimension = rng.choice(sorted(wh.dimensions))
                key = rng.choice(sorted(wh.dim_rows[dimension]))
                repo.link(
                    LinkKind.CONCEPT_DIM_ROW, entity_id,
                    (dimension, key), rand_date(rng, 400),
                )
    return repo


def random_window(rng: random.Random) -> ValidInterval:
    lo = rand_date(rng)
    return ValidInterval(lo, lo + timedelta(days=rng.randint(1, 400)))
