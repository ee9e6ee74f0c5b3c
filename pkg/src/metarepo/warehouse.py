"""Embedded miniature star-schema warehouse.

Dimension tables hold versioned rows (type-2 slowly changing dimensions,
same interval algebra as the metadata store); fact tables hold rows keyed by
dimension members plus a time point. Queries join each fact row to the
dimension version covering the fact's own time (or a fixed as-of date),
then filter, group, and aggregate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date

from .errors import ConflictError, NotFoundError, QueryError, ValidationError
from .model import Scalar, ValidInterval

COMPARE_OPS = ("=", "!=", "<", "<=", ">", ">=")
AGG_FNS = ("sum", "avg", "min", "max", "count")


@dataclass(frozen=True)
class DimensionDef:
    name: str
    key_attr: str
    attrs: tuple[str, ...]


@dataclass(frozen=True)
class DimensionRowVersion:
    dimension: str
    key: str
    attrs: dict[str, Scalar]
    interval: ValidInterval


@dataclass(frozen=True)
class FactDef:
    name: str
    dims: tuple[str, ...]
    measures: tuple[str, ...]


@dataclass(frozen=True)
class FactRow:
    fact: str
    dim_keys: dict[str, str]
    t: date
    values: dict[str, float]


@dataclass(frozen=True)
class QueryResult:
    """Aggregation output: group-key columns then aggregate columns."""

    columns: tuple[str, ...]
    rows: tuple[tuple, ...]


def compare(left, op: str, right) -> bool:
    """Predicate semantics shared by the query engine and its callers.

    Equality is plain equality; ordering requires compatible scalar types
    (numbers with numbers, text with text, dates with dates) and is False
    across types.
    """
    if op == "=":
        return left == right
    if op == "!=":
        return left != right
    left_num = isinstance(left, (int, float)) and not isinstance(left, bool)
    right_num = isinstance(right, (int, float)) and not isinstance(right, bool)
    if left_num and right_num:
        pass
    elif isinstance(left, str) and isinstance(right, str):
        pass
    elif isinstance(left, date) and isinstance(right, date):
        pass
    else:
        return False
    if op == "<":
        return left < right
    if op == "<=":
        return left <= right
    if op == ">":
        return left > right
    if op == ">=":
        return left >= right
    raise QueryError(f"unknown comparison operator '{op}'")


class Warehouse:
    """Dimension and fact storage plus the filter/group/aggregate engine."""

    def __init__(self) -> None:
        self.dimensions: dict[str, DimensionDef] = {}
        # dimension -> key -> version chain (ordered, disjoint, <= 1 open tail)
        self.dim_rows: dict[str, dict[str, list[DimensionRowVersion]]] = {}
        self.facts: dict[str, FactDef] = {}
        self.fact_rows: dict[str, list[FactRow]] = {}
        self._coordinates: dict[str, set[tuple]] = {}

    # -- schema -----------------------------------------------------------

    def define_dimension(self, definition: DimensionDef) -> None:
        if definition.name in self.dimensions:
            raise ConflictError(f"dimension '{definition.name}' already defined")
        if definition.key_attr not in definition.attrs:
            raise ValidationError(
                [f"key attribute '{definition.key_attr}' is not among the attributes"]
            )
        self.dimensions[definition.name] = definition
        self.dim_rows[definition.name] = {}

    def define_fact(self, definition: FactDef) -> None:
        if definition.name in self.facts:
            raise ConflictError(f"fact '{definition.name}' already defined")
        for dim in definition.dims:
            if dim not in self.dimensions:
                raise NotFoundError(f"fact '{definition.name}' references unknown dimension '{dim}'")
        self.facts[definition.name] = definition
        self.fact_rows[definition.name] = []
        self._coordinates[definition.name] = set()

    # -- dimension rows -----------------------------------------------------

    def upsert_dim_row(
        self,
        dimension: str,
        key: str,
        attrs: dict[str, Scalar],
        effective_from: date,
    ) -> None:
        """Type-2 upsert: close any open version of (dimension, key) at
        effective_from and append the new one."""
        definition = self.dimensions.get(dimension)
        if definition is None:
            raise NotFoundError(f"unknown dimension '{dimension}'")
        unknown = set(attrs) - set(definition.attrs)
        if unknown:
            raise ValidationError(
                [f"attributes {sorted(unknown)} not defined on dimension '{dimension}'"]
            )
        chain = self.dim_rows[dimension].setdefault(key, [])
        if chain:
            latest = chain[-1]
            if effective_from <= latest.interval.valid_from:
                raise ConflictError(
                    f"retroactive upsert for ({dimension}, {key}): {effective_from} "
                    f"is not after {latest.interval.valid_from}"
                )
            if latest.interval.is_open:
                chain[-1] = DimensionRowVersion(
                    dimension=latest.dimension,
                    key=latest.key,
                    attrs=latest.attrs,
                    interval=ValidInterval(latest.interval.valid_from, effective_from),
                )
        chain.append(
            DimensionRowVersion(
                dimension=dimension,
                key=key,
                attrs=dict(attrs),
                interval=ValidInterval(effective_from, None),
            )
        )

    def adopt_dim_row(self, row: DimensionRowVersion) -> None:
        """Append a pre-built row version to its chain (import path). Rows
        must arrive in interval order per (dimension, key)."""
        if row.dimension not in self.dimensions:
            raise NotFoundError(f"unknown dimension '{row.dimension}'")
        chain = self.dim_rows[row.dimension].setdefault(row.key, [])
        if chain and (
            chain[-1].interval.valid_to is None
            or chain[-1].interval.valid_to > row.interval.valid_from
        ):
            raise ConflictError(
                f"row version for ({row.dimension}, {row.key}) overlaps its predecessor"
            )
        chain.append(row)

    def resolve_dim_row(self, dimension: str, key: str, t: date) -> DimensionRowVersion | None:
        """The row version of (dimension, key) covering t, if any."""
        chain = self.dim_rows.get(dimension, {}).get(key)
        if not chain:
            return None
        for version in chain:
            if version.interval.covers(t):
                return version
        return None

    def rows_as_of(self, dimension: str, t: date) -> list[DimensionRowVersion]:
        """All row versions of a dimension covering t, ordered by key."""
        if dimension not in self.dimensions:
            raise NotFoundError(f"unknown dimension '{dimension}'")
        out = []
        for key in sorted(self.dim_rows[dimension]):
            version = self.resolve_dim_row(dimension, key, t)
            if version is not None:
                out.append(version)
        return out

    # -- facts ---------------------------------------------------------

    def insert_facts(self, rows: list[FactRow]) -> int:
        """Append fact rows; rejects unknown coordinates and duplicates.

        Dimension keys must exist with some version (any interval); the fact's
        time point need not be covered by it.
        """
        for row in rows:
            definition = self.facts.get(row.fact)
            if definition is None:
                raise NotFoundError(f"unknown fact '{row.fact}'")
            if set(row.dim_keys) != set(definition.dims):
                raise ValidationError(
                    [f"fact '{row.fact}' requires keys for dimensions {list(definition.dims)}"]
                )
            if set(row.values) != set(definition.measures):
                raise ValidationError(
                    [f"fact '{row.fact}' requires values for measures {list(definition.measures)}"]
                )
            for dim, key in row.dim_keys.items():
                if key not in self.dim_rows[dim]:
                    raise ValidationError(
                        [f"dimension '{dim}' has no row with key '{key}'"]
                    )
            coordinate = (tuple(sorted(row.dim_keys.items())), row.t)
            if coordinate in self._coordinates[row.fact]:
                raise ConflictError(
                    f"duplicate fact coordinate {dict(row.dim_keys)} at {row.t} "
                    f"in '{row.fact}'"
                )
            self._coordinates[row.fact].add(coordinate)
            self.fact_rows[row.fact].append(row)
        return len(rows)

    # -- queries -------------------------------------------------------

    def query_facts(
        self,
        fact: str,
        where: list[tuple[str, str, str, Scalar]] | None = None,
        group_by: list[tuple[str, str]] | None = None,
        agg: list[tuple[str, str]] | None = None,
        time_range: ValidInterval | None = None,
        dim_as_of: date | None = None,
    ) -> QueryResult:
        """Filter, group, and aggregate fact rows.

        where entries are (dimension, attr, op, value); group_by entries are
        (dimension, attr); agg entries are (fn, measure column). Dimension
        attributes resolve as-of each fact row's own time unless dim_as_of is
        given. Rows whose dimension keys do not resolve are dropped (inner
        join). Output rows are ordered by stringified group key.
        """
        definition = self.facts.get(fact)
        if definition is None:
            raise NotFoundError(f"unknown fact '{fact}'")
        where = list(where or [])
        group_by = list(group_by or [])
        agg = list(agg or [])
        if not agg:
            raise QueryError("aggregate list must not be empty")
        for fn, column in agg:
            if fn not in AGG_FNS:
                raise QueryError(f"unknown aggregate '{fn}'")
            if column not in definition.measures:
                raise QueryError(f"fact '{fact}' has no measure column '{column}'")
        for dimension, attr, op, _ in where:
            self._check_attr(definition, dimension, attr)
            if op not in COMPARE_OPS:
                raise QueryError(f"unknown comparison operator '{op}'")
        for dimension, attr in group_by:
            self._check_attr(definition, dimension, attr)

        groups: dict[tuple, list[FactRow]] = {}
        order: list[tuple] = []
        for row in self.fact_rows[fact]:
            if time_range is not None and not time_range.covers(row.t):
                continue
            resolved: dict[str, dict[str, Scalar]] = {}
            joinable = True
            for dim, key in row.dim_keys.items():
                version = self.resolve_dim_row(dim, key, dim_as_of or row.t)
                if version is None:
                    joinable = False
                    break
                resolved[dim] = version.attrs
            if not joinable:
                continue
            if not all(
                compare(resolved[dimension].get(attr), op, value)
                for dimension, attr, op, value in where
            ):
                continue
            group_key = tuple(resolved[dimension].get(attr) for dimension, attr in group_by)
            if group_key not in groups:
                groups[group_key] = []
                order.append(group_key)
            groups[group_key].append(row)

        columns = tuple(f"{dimension}.{attr}" for dimension, attr in group_by) + tuple(
            f"{fn}({column})" for fn, column in agg
        )
        rows_out = []
        for group_key in sorted(order, key=lambda k: tuple(str(v) for v in k)):
            members = groups[group_key]
            aggregates = []
            for fn, column in agg:
                values = [row.values[column] for row in members]
                if fn == "count":
                    aggregates.append(len(values))
                elif fn == "sum":
                    aggregates.append(_fold_sum(values))
                elif fn == "avg":
                    aggregates.append(_fold_sum(values) / len(values))
                elif fn == "min":
                    aggregates.append(min(values))
                else:
                    aggregates.append(max(values))
            rows_out.append(group_key + tuple(aggregates))
        return QueryResult(columns=columns, rows=tuple(rows_out))

    def _check_attr(self, definition: FactDef, dimension: str, attr: str) -> None:
        if dimension not in definition.dims:
            raise QueryError(
                f"dimension '{dimension}' is not among fact '{definition.name}' dimensions"
            )
        if attr not in self.dimensions[dimension].attrs:
            raise QueryError(f"dimension '{dimension}' has no attribute '{attr}'")

    # -- bookkeeping ----------------------------------------------------

    def max_known_date(self) -> date | None:
        latest: date | None = None
        for chains in self.dim_rows.values():
            for chain in chains.values():
                for version in chain:
                    for bound in (version.interval.valid_from, version.interval.valid_to):
                        if bound is not None and (latest is None or bound > latest):
                            latest = bound
        for rows in self.fact_rows.values():
            for row in rows:
                if latest is None or row.t > latest:
                    latest = row.t
        return latest

    def check_invariants(self) -> list[str]:
        """Dimension row chains obey the same interval algebra as concepts."""
        problems = []
        for dimension, chains in self.dim_rows.items():
            for key, chain in chains.items():
                for i, version in enumerate(chain):
                    label = f"dimension row ({dimension}, {key})"
                    if version.interval.valid_to is None:
                        if i != len(chain) - 1:
                            problems.append(f"{label}: open interval before the tail")
                    elif not version.interval.valid_from < version.interval.valid_to:
                        problems.append(f"{label}: empty or inverted interval")
                    if i > 0:
                        prev = chain[i - 1]
                        if (
                            prev.interval.valid_to is None
                            or prev.interval.valid_to > version.interval.valid_from
                        ):
                            problems.append(f"{label}: overlapping or disordered versions")
        return problems


def _fold_sum(values: list[float]) -> float:
    # Plain left fold in insertion order: reproducible across runs.
    total = 0.0
    for v in values:
        total += v
    return total
