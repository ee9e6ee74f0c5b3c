"""HTTP facade over the repository.

Every endpoint is a thin adapter over exactly one repository operation and
returns the canonical JSON serialization of that operation's result, so
responses are byte-reproducible. The server injects no wall-clock time:
"current" reads default to the store's latest known date.

Writes are serialized behind one lock (single-writer contract) and, when the
app is bound to a store path, each successful write re-exports the store
atomically.
"""

from __future__ import annotations

import os
import threading
from datetime import date

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware

from . import navql
from .errors import (
    ConflictError,
    MetarepoError,
    NotFoundError,
    QueryError,
    RecordError,
    ValidationError,
)
from .linkage import LinkKind, Repository, advertised_methods
from .model import AssociationKind, ConceptKind, ValidInterval
from .serialize import (
    canonical_json,
    decode_scalar,
    encode_concept,
    encode_dim_row,
    encode_dimension_def,
    encode_fact_def,
    encode_link,
    encode_query_result,
    export_repository,
)

_STATUS = {
    "not_found": 404,
    "validation": 400,
    "bad_request": 400,
    "parse_error": 400,
    "conflict": 409,
}


def _api_error(exc: MetarepoError) -> tuple[int, dict]:
    if isinstance(exc, NotFoundError):
        code, detail = "not_found", None
    elif isinstance(exc, ValidationError):
        code, detail = "validation", {"violations": exc.violations}
    elif isinstance(exc, navql.ParseError):
        code, detail = "parse_error", {"offset": exc.offset, "expected": list(exc.expected)}
    elif isinstance(exc, ConflictError):
        code, detail = "conflict", None
    elif isinstance(exc, RecordError):
        code, detail = "validation", {"line": exc.line, "field": exc.field}
    else:
        code, detail = "bad_request", None
    return _STATUS[code], {"code": code, "message": str(exc), "detail": detail}


def _parse_date(raw: str, label: str) -> date:
    try:
        return date.fromisoformat(raw)
    except (TypeError, ValueError):
        raise QueryError(f"{label} must be a YYYY-MM-DD date, got {raw!r}") from None


def _require(body: dict, field: str):
    if field not in body:
        raise QueryError(f"missing field '{field}'")
    return body[field]


def _body_date(body: dict, field: str) -> date:
    return _parse_date(_require(body, field), field)


def _body_attrs(body: dict, field: str) -> dict:
    raw = body.get(field) or {}
    if not isinstance(raw, dict):
        raise QueryError(f"'{field}' must be an object")
    return {k: decode_scalar(v, 0, k) for k, v in raw.items()}


def _body_interval(raw, label: str) -> ValidInterval | None:
    if raw is None:
        return None
    if not isinstance(raw, dict):
        raise QueryError(f"'{label}' must be an object with valid_from/valid_to")
    valid_from = _parse_date(_require(raw, "valid_from"), f"{label}.valid_from")
    raw_to = raw.get("valid_to")
    valid_to = None if raw_to is None else _parse_date(raw_to, f"{label}.valid_to")
    return ValidInterval(valid_from, valid_to)


def _parse_enum(enum_cls, raw, label: str):
    try:
        return enum_cls(raw)
    except ValueError:
        raise ValidationError([f"unknown {label} {raw!r}"]) from None


def create_app(repo: Repository, store_path: str | None = None) -> FastAPI:
    """Build the service over an already-loaded repository."""
    app = FastAPI(title="metarepo", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    lock = threading.RLock()

    def ok(payload) -> Response:
        return Response(content=canonical_json(payload), media_type="application/json")

    def persist() -> None:
        if store_path is None:
            return
        tmp = store_path + ".tmp"
        with open(tmp, "wb") as handle:
            handle.write(export_repository(repo))
        os.replace(tmp, store_path)

    def default_asof(raw: str | None) -> date:
        if raw is not None:
            return _parse_date(raw, "asof")
        known = repo.max_known_date()
        if known is None:
            raise QueryError("the store is empty; supply an explicit asof date")
        return known

    @app.exception_handler(MetarepoError)
    async def handle_domain_error(_request: Request, exc: MetarepoError) -> Response:
        status, payload = _api_error(exc)
        return Response(
            status_code=status,
            content=canonical_json(payload),
            media_type="application/json",
        )

    # -- concepts -------------------------------------------------------

    @app.get("/concepts")
    async def list_concepts(request: Request) -> Response:
        params = request.query_params
        kind = None
        if params.get("kind") is not None:
            kind = _parse_enum(ConceptKind, params["kind"], "kind")
        with lock:
            versions = repo.store.find_concepts(
                kind, params.get("name"), default_asof(params.get("asof"))
            )
            return ok([encode_concept(v) for v in versions])

    @app.post("/concepts")
    async def create_concept(request: Request) -> Response:
        body = await request.json()
        with lock:
            logical_id = repo.store.create_concept(
                _parse_enum(ConceptKind, _require(body, "kind"), "kind"),
                _require(body, "name"),
                body.get("description", ""),
                _body_attrs(body, "attributes"),
                _body_date(body, "valid_from"),
            )
            persist()
            return ok({"logical_id": logical_id})

    @app.get("/concepts/{logical_id}")
    async def get_concept(logical_id: str, request: Request) -> Response:
        with lock:
            version = repo.store.get_as_of(
                logical_id, default_asof(request.query_params.get("asof"))
            )
            if version is None:
                raise NotFoundError(f"no version of '{logical_id}' at the requested date")
            return ok(encode_concept(version))

    @app.patch("/concepts/{logical_id}")
    async def update_concept(logical_id: str, request: Request) -> Response:
        body = await request.json()
        attributes = None
        if body.get("attributes") is not None:
            attributes = _body_attrs(body, "attributes")
        with lock:
            version_no = repo.store.update_concept(
                logical_id,
                name=body.get("name"),
                description=body.get("description"),
                attributes=attributes,
                effective_from=_body_date(body, "effective_from"),
            )
            persist()
            return ok({"version_no": version_no})

    @app.delete("/concepts/{logical_id}")
    async def retire_concept(logical_id: str, request: Request) -> Response:
        at = request.query_params.get("at")
        if at is None:
            raise QueryError("missing 'at' date")
        with lock:
            repo.store.retire_concept(logical_id, _parse_date(at, "at"))
            persist()
            return ok({"ok": True})

    @app.get("/concepts/{logical_id}/history")
    async def get_history(logical_id: str) -> Response:
        with lock:
            return ok([encode_concept(v) for v in repo.store.get_history(logical_id)])

    @app.get("/concepts/{logical_id}/nav/{method}")
    async def navigate(logical_id: str, method: str, request: Request) -> Response:
        params = request.query_params
        with lock:
            if method == "history":
                return ok([encode_concept(v) for v in repo.store.get_history(logical_id)])
            if params.get("from") is not None or params.get("to") is not None:
                window = ValidInterval(
                    _parse_date(params.get("from"), "from"),
                    _parse_date(params.get("to"), "to"),
                )
                return ok(sorted(repo.navigate_during(logical_id, method, window)))
            t = default_asof(params.get("asof"))
            if method == "getDimension":
                dimension, rows = repo.get_dimension(logical_id, t)
                return ok({"dimension": dimension, "rows": [encode_dim_row(r) for r in rows]})
            if method == "getFacts":
                fact, column = repo.get_facts(logical_id, t)
                return ok({"fact": fact, "column": column})
            return ok(sorted(repo.navigate(logical_id, method, t)))

    # -- associations ---------------------------------------------------

    @app.post("/associations")
    async def create_association(request: Request) -> Response:
        body = await request.json()
        with lock:
            assoc_id = repo.store.create_association(
                _parse_enum(AssociationKind, _require(body, "kind"), "association kind"),
                _require(body, "src"),
                _require(body, "dst"),
                _body_date(body, "valid_from"),
            )
            persist()
            return ok({"assoc_id": assoc_id})

    @app.delete("/associations/{assoc_id}")
    async def end_association(assoc_id: str, request: Request) -> Response:
        at = request.query_params.get("at")
        if at is None:
            raise QueryError("missing 'at' date")
        with lock:
            repo.store.end_association(assoc_id, _parse_date(at, "at"))
            persist()
            return ok({"ok": True})

    # -- links ---------------------------------------------------------

    @app.post("/links")
    async def create_link(request: Request) -> Response:
        body = await request.json()
        kind = _parse_enum(LinkKind, _require(body, "kind"), "link kind")
        if kind is LinkKind.CONCEPT_DIMENSION:
            target = _require(body, "dimension")
        elif kind is LinkKind.MEASURE_FACT:
            target = (_require(body, "fact"), _require(body, "column"))
        else:
            target = (_require(body, "dimension"), _require(body, "key"))
        with lock:
            link_id = repo.link(
                kind, _require(body, "concept_id"), target, _body_date(body, "valid_from")
            )
            persist()
            return ok({"link_id": link_id})

    # -- warehouse -------------------------------------------------------

    @app.get("/warehouse/dims")
    async def list_dimensions() -> Response:
        with lock:
            return ok([
                encode_dimension_def(repo.warehouse.dimensions[name])
                for name in sorted(repo.warehouse.dimensions)
            ])

    @app.get("/warehouse/facts")
    async def list_facts() -> Response:
        with lock:
            return ok([
                encode_fact_def(repo.warehouse.facts[name])
                for name in sorted(repo.warehouse.facts)
            ])

    @app.get("/warehouse/dims/{dimension}/rows")
    async def dimension_rows(dimension: str, request: Request) -> Response:
        with lock:
            rows = repo.warehouse.rows_as_of(
                dimension, default_asof(request.query_params.get("asof"))
            )
            return ok([encode_dim_row(r) for r in rows])

    @app.get("/warehouse/facts/{fact}/measures")
    async def fact_measures(fact: str, request: Request) -> Response:
        with lock:
            t = default_asof(request.query_params.get("asof"))
            return ok(sorted(repo.fact_to_measures(fact, t)))

    @app.get("/warehouse/dims/{dimension}/rows/{key}/concepts")
    async def row_concepts(dimension: str, key: str, request: Request) -> Response:
        with lock:
            t = default_asof(request.query_params.get("asof"))
            return ok(sorted(repo.row_to_concepts(dimension, key, t)))

    @app.get("/warehouse/dims/{dimension}/rows/{key}/actions")
    async def row_actions(dimension: str, key: str, request: Request) -> Response:
        with lock:
            t = default_asof(request.query_params.get("asof"))
            return ok(sorted(repo.actions_targeting(dimension, key, t)))

    @app.post("/warehouse/query")
    async def warehouse_query(request: Request) -> Response:
        body = await request.json()
        where = []
        for entry in body.get("where") or []:
            dimension, attr, op, value = entry
            where.append((dimension, attr, op, decode_scalar(value, 0, attr)))
        group_by = [tuple(entry) for entry in body.get("group_by") or []]
        agg = [tuple(entry) for entry in body.get("agg") or []]
        dim_as_of = body.get("dim_as_of")
        with lock:
            result = repo.warehouse.query_facts(
                _require(body, "fact"),
                where=where,
                group_by=group_by,
                agg=agg,
                time_range=_body_interval(body.get("time_range"), "time_range"),
                dim_as_of=None if dim_as_of is None else _parse_date(dim_as_of, "dim_as_of"),
            )
            return ok(encode_query_result(result))

    # -- NavQL ----------------------------------------------------------

    @app.post("/query")
    async def run_query(request: Request) -> Response:
        body = await request.json()
        query = navql.parse(_require(body, "q"))
        with lock:
            now_raw = body.get("now")
            now = default_asof(now_raw if now_raw is None else str(now_raw))
            return ok(navql.encode_result(navql.evaluate(query, repo, now)))

    # -- evaluations and actions ------------------------------------------

    @app.post("/evaluations")
    async def record_evaluation(request: Request) -> Response:
        body = await request.json()
        with lock:
            evaluation_id = repo.record_evaluation(
                _require(body, "goal_id"),
                body.get("measure_id"),
                _require(body, "text"),
                _body_date(body, "at"),
                provenance=body.get("provenance"),
            )
            persist()
            return ok({"evaluation_id": evaluation_id})

    @app.post("/actions")
    async def record_action(request: Request) -> Response:
        body = await request.json()
        targets = [tuple(entry) for entry in body.get("targets") or []]
        with lock:
            record = repo.record_action(
                list(body.get("evaluation_ids") or []),
                _require(body, "text"),
                targets,
                _body_date(body, "at"),
            )
            persist()
            return ok({
                "action_id": record.action_id,
                "association_ids": list(record.association_ids),
                "link_ids": list(record.link_ids),
                "free_standing": record.free_standing,
            })

    # -- introspection ------------------------------------------------------

    @app.get("/nav/methods")
    async def method_table() -> Response:
        return ok({kind.value: advertised_methods(kind) for kind in ConceptKind})

    return app


def serve(store_path: str, host: str, port: int) -> None:
    """Load the store file and run the HTTP service (blocking)."""
    import uvicorn

    from .serialize import import_repository

    with open(store_path, "rb") as handle:
        repo = import_repository(handle.read())
    uvicorn.run(create_app(repo, store_path=store_path), host=host, port=port, log_level="warning")
