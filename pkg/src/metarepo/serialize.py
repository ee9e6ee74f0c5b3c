"""Canonical NDJSON interchange for the whole repository.

One UTF-8 line per record, discriminated by a "rec" field: "meta" (header),
"concept", "assoc", "dimdef", "dimrow", "factdef", "fact", "xlink". Export
order is canonical (record kind, then ids, then version order), so two
value-identical repositories export byte-identical files and
export -> import -> export is a fixpoint.

The per-object encoders here are also the API wire format (minus "rec").
"""

from __future__ import annotations

import json
from datetime import date
from typing import Any

from .errors import RecordError
from .linkage import CrossLink, LinkKind, Repository
from .model import (
    AssociationKind,
    AssociationVersion,
    ConceptKind,
    ConceptVersion,
    ValidInterval,
)
from .warehouse import DimensionDef, DimensionRowVersion, FactDef, FactRow, QueryResult

FORMAT_NAME = "metarepo-ndjson"
FORMAT_VERSION = 1


def canonical_json(obj: Any) -> bytes:
    """Deterministic JSON bytes: sorted keys, compact, ASCII, one trailing
    newline. Used for NDJSON lines and for API response bodies."""
    return (json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n").encode("utf-8")


# -- scalar and interval encoding -------------------------------------------


def encode_scalar(value):
    if isinstance(value, date):
        return {"$date": value.isoformat()}
    return value


def decode_scalar(value, line: int, field: str):
    if isinstance(value, dict):
        if set(value) == {"$date"} and isinstance(value["$date"], str):
            return _parse_date(value["$date"], line, field)
        raise RecordError(line, field, "scalar values must be text, number, or {'$date': ...}")
    if isinstance(value, bool) or not isinstance(value, (str, int, float)):
        raise RecordError(line, field, f"scalar expected, got {type(value).__name__}")
    return value


def _interval_fields(interval: ValidInterval) -> dict:
    return {
        "valid_from": interval.valid_from.isoformat(),
        "valid_to": None if interval.valid_to is None else interval.valid_to.isoformat(),
    }


# -- object encoders (shared with the HTTP API) ------------------------------


def encode_concept(v: ConceptVersion) -> dict:
    return {
        "logical_id": v.logical_id,
        "version_no": v.version_no,
        "kind": v.kind.value,
        "name": v.name,
        "description": v.description,
        "attributes": {k: encode_scalar(x) for k, x in sorted(v.attributes.items())},
        **_interval_fields(v.interval),
    }


def encode_association(a: AssociationVersion) -> dict:
    return {
        "assoc_id": a.assoc_id,
        "kind": a.kind.value,
        "src": a.src,
        "dst": a.dst,
        **_interval_fields(a.interval),
    }


def encode_dimension_def(d: DimensionDef) -> dict:
    return {"name": d.name, "key_attr": d.key_attr, "attrs": list(d.attrs)}


def encode_dim_row(r: DimensionRowVersion) -> dict:
    return {
        "dimension": r.dimension,
        "key": r.key,
        "attrs": {k: encode_scalar(x) for k, x in sorted(r.attrs.items())},
        **_interval_fields(r.interval),
    }


def encode_fact_def(f: FactDef) -> dict:
    return {"name": f.name, "dims": list(f.dims), "measures": list(f.measures)}


def encode_fact_row(r: FactRow) -> dict:
    return {
        "fact": r.fact,
        "dim_keys": dict(sorted(r.dim_keys.items())),
        "t": r.t.isoformat(),
        "values": dict(sorted(r.values.items())),
    }


def encode_link(x: CrossLink) -> dict:
    return {
        "link_id": x.link_id,
        "kind": x.kind.value,
        "concept_id": x.concept_id,
        "dimension": x.dimension,
        "key": x.key,
        "fact": x.fact,
        "column": x.column,
        **_interval_fields(x.interval),
    }


def encode_query_result(result: QueryResult) -> dict:
    return {
        "columns": list(result.columns),
        "rows": [[encode_scalar(v) for v in row] for row in result.rows],
    }


# -- export ------------------------------------------------------------------


def export_repository(repo: Repository) -> bytes:
    """Serialize the repository to canonical NDJSON bytes."""
    lines = [canonical_json({"rec": "meta", "format": FORMAT_NAME, "version": FORMAT_VERSION})]
    for logical_id in sorted(repo.store.concepts):
        for version in repo.store.concepts[logical_id]:
            lines.append(canonical_json({"rec": "concept", **encode_concept(version)}))
    for assoc_id in sorted(repo.store.associations):
        lines.append(
            canonical_json({"rec": "assoc", **encode_association(repo.store.associations[assoc_id])})
        )
    for name in sorted(repo.warehouse.dimensions):
        lines.append(
            canonical_json({"rec": "dimdef", **encode_dimension_def(repo.warehouse.dimensions[name])})
        )
    for name in sorted(repo.warehouse.dim_rows):
        for key in sorted(repo.warehouse.dim_rows[name]):
            for row in repo.warehouse.dim_rows[name][key]:
                lines.append(canonical_json({"rec": "dimrow", **encode_dim_row(row)}))
    for name in sorted(repo.warehouse.facts):
        lines.append(
            canonical_json({"rec": "factdef", **encode_fact_def(repo.warehouse.facts[name])})
        )
    for name in sorted(repo.warehouse.fact_rows):
        rows = sorted(
            repo.warehouse.fact_rows[name], key=lambda r: (tuple(sorted(r.dim_keys.items())), r.t)
        )
        for row in rows:
            lines.append(canonical_json({"rec": "fact", **encode_fact_row(row)}))
    for link_id in sorted(repo.links):
        lines.append(canonical_json({"rec": "xlink", **encode_link(repo.links[link_id])}))
    return b"".join(lines)


# -- import ------------------------------------------------------------------


def import_repository(data: bytes) -> Repository:
    """Parse canonical NDJSON into a fresh repository."""
    repo = Repository()
    ingest(repo, data)
    return repo


def ingest(repo: Repository, data: bytes) -> int:
    """Append records from an NDJSON document to an existing repository.

    The first line must be the format header. Records may otherwise appear in
    any order; they are applied schema-first. Returns the number of data
    records applied. Malformed input raises RecordError naming the line and
    field.
    """
    parsed: list[tuple[int, dict]] = []
    for line_no, raw in enumerate(data.split(b"\n"), start=1):
        if not raw.strip():
            continue
        try:
            obj = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise RecordError(line_no, "record", f"invalid JSON ({exc})") from None
        if not isinstance(obj, dict):
            raise RecordError(line_no, "record", "each line must be a JSON object")
        parsed.append((line_no, obj))

    if not parsed:
        raise RecordError(1, "rec", "missing header record")
    first_line, header = parsed[0]
    if header.get("rec") != "meta":
        raise RecordError(first_line, "rec", "first record must be the 'meta' header")
    if header.get("format") != FORMAT_NAME:
        raise RecordError(first_line, "format", f"expected '{FORMAT_NAME}'")
    if header.get("version") != FORMAT_VERSION:
        raise RecordError(first_line, "version", f"expected {FORMAT_VERSION}")

    by_kind: dict[str, list[tuple[int, dict]]] = {
        "concept": [], "assoc": [], "dimdef": [], "dimrow": [],
        "factdef": [], "fact": [], "xlink": [],
    }
    for line_no, obj in parsed[1:]:
        rec = obj.get("rec")
        if rec == "meta":
            raise RecordError(line_no, "rec", "duplicate 'meta' header")
        if rec not in by_kind:
            raise RecordError(line_no, "rec", f"unknown record kind {rec!r}")
        by_kind[rec].append((line_no, obj))

    for line_no, obj in by_kind["dimdef"]:
        _apply_dimdef(repo, line_no, obj)
    for line_no, obj in by_kind["factdef"]:
        _apply_factdef(repo, line_no, obj)
    _apply_concepts(repo, by_kind["concept"])
    for line_no, obj in by_kind["assoc"]:
        _apply_assoc(repo, line_no, obj)
    _apply_dimrows(repo, by_kind["dimrow"])
    for line_no, obj in by_kind["fact"]:
        _apply_fact(repo, line_no, obj)
    for line_no, obj in by_kind["xlink"]:
        _apply_xlink(repo, line_no, obj)
    return len(parsed) - 1


def _field(obj: dict, name: str, types, line: int, nullable: bool = False):
    if name not in obj:
        raise RecordError(line, name, "missing field")
    value = obj[name]
    if value is None:
        if nullable:
            return None
        raise RecordError(line, name, "must not be null")
    if not isinstance(value, types):
        raise RecordError(line, name, f"unexpected type {type(value).__name__}")
    return value


def _parse_date(text: str, line: int, field: str) -> date:
    try:
        return date.fromisoformat(text)
    except ValueError:
        raise RecordError(line, field, f"not a YYYY-MM-DD date: {text!r}") from None


def _parse_interval(obj: dict, line: int) -> ValidInterval:
    valid_from = _parse_date(_field(obj, "valid_from", str, line), line, "valid_from")
    raw_to = _field(obj, "valid_to", str, line, nullable=True)
    valid_to = None if raw_to is None else _parse_date(raw_to, line, "valid_to")
    interval = ValidInterval(valid_from, valid_to)
    if valid_to is not None and valid_to <= valid_from:
        raise RecordError(line, "valid_to", "interval end must follow its start")
    return interval


def _parse_attrs(obj: dict, name: str, line: int) -> dict:
    raw = _field(obj, name, dict, line)
    return {k: decode_scalar(v, line, f"{name}.{k}") for k, v in raw.items()}


def _parse_enum(enum_cls, obj: dict, name: str, line: int):
    raw = _field(obj, name, str, line)
    try:
        return enum_cls(raw)
    except ValueError:
        raise RecordError(line, name, f"unknown value {raw!r}") from None


def _wrap(line: int, field: str, fn):
    from .errors import MetarepoError

    try:
        return fn()
    except RecordError:
        raise
    except MetarepoError as exc:
        raise RecordError(line, field, str(exc)) from None


def _apply_dimdef(repo: Repository, line: int, obj: dict) -> None:
    name = _field(obj, "name", str, line)
    key_attr = _field(obj, "key_attr", str, line)
    attrs = _field(obj, "attrs", list, line)
    if not all(isinstance(a, str) for a in attrs):
        raise RecordError(line, "attrs", "attribute names must be text")
    _wrap(line, "name", lambda: repo.warehouse.define_dimension(
        DimensionDef(name=name, key_attr=key_attr, attrs=tuple(attrs))
    ))


def _apply_factdef(repo: Repository, line: int, obj: dict) -> None:
    name = _field(obj, "name", str, line)
    dims = _field(obj, "dims", list, line)
    measures = _field(obj, "measures", list, line)
    if not all(isinstance(d, str) for d in dims):
        raise RecordError(line, "dims", "dimension names must be text")
    if not all(isinstance(m, str) for m in measures):
        raise RecordError(line, "measures", "measure names must be text")
    _wrap(line, "name", lambda: repo.warehouse.define_fact(
        FactDef(name=name, dims=tuple(dims), measures=tuple(measures))
    ))


def _apply_concepts(repo: Repository, records: list[tuple[int, dict]]) -> None:
    from .model import validate_concept

    incoming: dict[str, list[tuple[int, ConceptVersion]]] = {}
    for line, obj in records:
        version = ConceptVersion(
            logical_id=_field(obj, "logical_id", str, line),
            version_no=_field(obj, "version_no", int, line),
            kind=_parse_enum(ConceptKind, obj, "kind", line),
            name=_field(obj, "name", str, line),
            description=_field(obj, "description", str, line),
            attributes=_parse_attrs(obj, "attributes", line),
            interval=_parse_interval(obj, line),
        )
        violations = validate_concept(version)
        if violations:
            raise RecordError(line, "record", "; ".join(violations))
        incoming.setdefault(version.logical_id, []).append((line, version))

    for logical_id, pairs in incoming.items():
        pairs.sort(key=lambda p: p[1].version_no)
        first_line = pairs[0][0]
        seen = {p[1].version_no for p in pairs}
        if len(seen) != len(pairs):
            raise RecordError(first_line, "version_no", f"duplicate version for '{logical_id}'")
        _wrap(first_line, "record", lambda pairs=pairs: repo.store.extend_chain(
            logical_id, [p[1] for p in pairs]
        ))


def _apply_assoc(repo: Repository, line: int, obj: dict) -> None:
    assoc_id = _field(obj, "assoc_id", str, line)
    kind = _parse_enum(AssociationKind, obj, "kind", line)
    src = _field(obj, "src", str, line)
    dst = _field(obj, "dst", str, line)
    interval = _parse_interval(obj, line)

    def apply() -> None:
        created = repo.store.create_association(
            kind, src, dst, interval.valid_from, assoc_id=assoc_id
        )
        if interval.valid_to is not None:
            repo.store.end_association(created, interval.valid_to)

    _wrap(line, "record", apply)


def _apply_dimrows(repo: Repository, records: list[tuple[int, dict]]) -> None:
    rows = []
    for line, obj in records:
        rows.append(
            (
                line,
                DimensionRowVersion(
                    dimension=_field(obj, "dimension", str, line),
                    key=_field(obj, "key", str, line),
                    attrs=_parse_attrs(obj, "attrs", line),
                    interval=_parse_interval(obj, line),
                ),
            )
        )
    # Apply per (dimension, key) chain in interval order so type-2 closure
    # reconstructs exactly, including explicitly closed tails.
    rows.sort(key=lambda p: (p[1].dimension, p[1].key, p[1].interval.valid_from))
    for line, row in rows:
        _wrap(line, "record", lambda row=row: repo.warehouse.adopt_dim_row(row))


def _apply_fact(repo: Repository, line: int, obj: dict) -> None:
    fact = _field(obj, "fact", str, line)
    dim_keys = _field(obj, "dim_keys", dict, line)
    if not all(isinstance(k, str) and isinstance(v, str) for k, v in dim_keys.items()):
        raise RecordError(line, "dim_keys", "keys and values must be text")
    t = _parse_date(_field(obj, "t", str, line), line, "t")
    values = _field(obj, "values", dict, line)
    for column, value in values.items():
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise RecordError(line, f"values.{column}", "measure values must be numbers")
    row = FactRow(fact=fact, dim_keys=dict(dim_keys), t=t,
                  values={k: float(v) for k, v in values.items()})
    _wrap(line, "record", lambda: repo.warehouse.insert_facts([row]))


def _apply_xlink(repo: Repository, line: int, obj: dict) -> None:
    link_id = _field(obj, "link_id", str, line)
    kind = _parse_enum(LinkKind, obj, "kind", line)
    concept_id = _field(obj, "concept_id", str, line)
    dimension = _field(obj, "dimension", str, line, nullable=True)
    key = _field(obj, "key", str, line, nullable=True)
    fact = _field(obj, "fact", str, line, nullable=True)
    column = _field(obj, "column", str, line, nullable=True)
    interval = _parse_interval(obj, line)
    if kind is LinkKind.CONCEPT_DIMENSION:
        target = dimension
    elif kind in (LinkKind.CONCEPT_DIM_ROW, LinkKind.ACTION_DIM_ROW):
        target = (dimension, key)
    else:
        target = (fact, column)

    def apply() -> None:
        created = repo.link(kind, concept_id, target, interval.valid_from, link_id=link_id)
        if interval.valid_to is not None:
            repo.end_link(created, interval.valid_to)

    _wrap(line, "record", apply)
