"""Command-line entry point.

Exit codes: 0 success, 1 domain error (message on stderr), 2 usage error.
Store files are the canonical NDJSON interchange documents.
"""

from __future__ import annotations

import argparse
import os
import sys
from datetime import date

from . import navql
from .errors import MetarepoError, QueryError
from .fixtures import build_demo_repository
from .linkage import Repository
from .serialize import export_repository, import_repository, ingest


def _load(store_path: str) -> Repository:
    try:
        with open(store_path, "rb") as handle:
            return import_repository(handle.read())
    except OSError as exc:
        raise MetarepoError(f"cannot read store '{store_path}': {exc.strerror}") from None


def _save(repo: Repository, store_path: str) -> None:
    tmp = store_path + ".tmp"
    with open(tmp, "wb") as handle:
        handle.write(export_repository(repo))
    os.replace(tmp, store_path)


def _parse_date(raw: str, label: str) -> date:
    try:
        return date.fromisoformat(raw)
    except ValueError:
        raise QueryError(f"{label} must be a YYYY-MM-DD date, got {raw!r}") from None


def _resolve_now(repo: Repository, raw: str | None) -> date:
    if raw is not None:
        return _parse_date(raw, "--now")
    known = repo.max_known_date()
    if known is None:
        raise QueryError("the store is empty; supply --now")
    return known


def _cmd_init(args: argparse.Namespace) -> int:
    if os.path.exists(args.store):
        raise MetarepoError(f"refusing to overwrite existing file '{args.store}'")
    _save(Repository(), args.store)
    return 0


def _cmd_load(args: argparse.Namespace) -> int:
    repo = _load(args.store)
    try:
        with open(args.file, "rb") as handle:
            count = ingest(repo, handle.read())
    except OSError as exc:
        raise MetarepoError(f"cannot read '{args.file}': {exc.strerror}") from None
    _save(repo, args.store)
    print(f"loaded {count} records into {args.store}")
    return 0


def _cmd_export(args: argparse.Namespace) -> int:
    data = export_repository(_load(args.store))
    if args.output:
        with open(args.output, "wb") as handle:
            handle.write(data)
    else:
        sys.stdout.buffer.write(data)
    return 0


def _format_interval(version) -> str:
    end = version.interval.valid_to.isoformat() if version.interval.valid_to else "open"
    return f"[{version.interval.valid_from.isoformat()}, {end})"


def _print_concept_rows(versions) -> None:
    for v in versions:
        line = f"{v.logical_id}  v{v.version_no}  {v.kind.value}  {_format_interval(v)}  {v.name}"
        if v.description:
            line += f" -- {v.description}"
        print(line)


def _print_table(result) -> None:
    print("  ".join(result.columns))
    for row in result.rows:
        print("  ".join(str(v) for v in row))


def _cmd_query(args: argparse.Namespace) -> int:
    repo = _load(args.store)
    result = navql.run(args.query, repo, _resolve_now(repo, args.now))
    if args.format == "json":
        from .serialize import canonical_json

        sys.stdout.buffer.write(canonical_json(navql.encode_result(result)))
        return 0
    if isinstance(result, (navql.ResultSet, navql.HistoryResult)):
        _print_concept_rows(result.versions)
    else:
        _print_table(result)
    return 0


def _cmd_history(args: argparse.Namespace) -> int:
    repo = _load(args.store)
    _print_concept_rows(repo.store.get_history(args.id))
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    from .service import serve

    host, _, port = args.bind.rpartition(":")
    if not host or not port.isdigit():
        raise QueryError(f"--bind must be addr:port, got {args.bind!r}")
    if not os.path.exists(args.store):
        raise MetarepoError(f"cannot read store '{args.store}': No such file or directory")
    serve(args.store, host, int(port))
    return 0


def _cmd_seed_demo(args: argparse.Namespace) -> int:
    _save(build_demo_repository(), args.store)
    print(f"seeded demo dataset into {args.store}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="metarepo",
        description="Temporal business-metadata repository with an embedded warehouse",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("init", help="create an empty store file")
    p.add_argument("store")
    p.set_defaults(func=_cmd_init)

    p = sub.add_parser("load", help="import NDJSON records into a store (append)")
    p.add_argument("store")
    p.add_argument("file")
    p.set_defaults(func=_cmd_load)

    p = sub.add_parser("export", help="write the canonical export")
    p.add_argument("store")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_export)

    p = sub.add_parser("query", help="run a NavQL query")
    p.add_argument("store")
    p.add_argument("-q", "--query", required=True)
    p.add_argument("--now")
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.set_defaults(func=_cmd_query)

    p = sub.add_parser("history", help="print a concept's version history")
    p.add_argument("store")
    p.add_argument("--id", required=True)
    p.set_defaults(func=_cmd_history)

    p = sub.add_parser("serve", help="run the HTTP service over a store")
    p.add_argument("store")
    p.add_argument("--bind", default="127.0.0.1:8000")
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("seed-demo", help="load the bundled central-bank demo dataset")
    p.add_argument("store")
    p.set_defaults(func=_cmd_seed_demo)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except MetarepoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
