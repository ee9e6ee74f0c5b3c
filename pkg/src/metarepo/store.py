"""Append-only valid-time version store for concepts and associations.

Versions of one logical object form a chain: pairwise-disjoint half-open
intervals ordered by start date, with at most one open tail. Updates close
the open tail and append; nothing is ever rewritten, so history is immutable.

Single-writer, multiple-reader. The store holds no wall clock: "current"
always means as-of a caller-supplied date.
"""

from __future__ import annotations

from datetime import date

from .errors import ConflictError, NotFoundError, ValidationError
from .model import (
    AssociationKind,
    AssociationVersion,
    ConceptKind,
    ConceptVersion,
    Scalar,
    ValidInterval,
    validate_association,
    validate_concept,
)

Direction = str  # "forward" | "reverse"


def _as_of(versions: list[ConceptVersion], t: date) -> ConceptVersion | None:
    for v in versions:
        if v.interval.covers(t):
            return v
    return None


class Store:
    """In-memory metadata store: concept chains, association records, indexes."""

    def __init__(self) -> None:
        self.concepts: dict[str, list[ConceptVersion]] = {}
        self.associations: dict[str, AssociationVersion] = {}
        # kind -> logical ids
        self._by_kind: dict[ConceptKind, set[str]] = {k: set() for k in ConceptKind}
        # (logical_id, assoc kind, direction) -> assoc ids incident at that end
        self._incident: dict[tuple[str, AssociationKind, Direction], set[str]] = {}
        self._next_concept = 1
        self._next_assoc = 1

    # -- id allocation --------------------------------------------------

    def _alloc_concept_id(self) -> str:
        while f"c{self._next_concept}" in self.concepts:
            self._next_concept += 1
        cid = f"c{self._next_concept}"
        self._next_concept += 1
        return cid

    def _alloc_assoc_id(self) -> str:
        while f"a{self._next_assoc}" in self.associations:
            self._next_assoc += 1
        aid = f"a{self._next_assoc}"
        self._next_assoc += 1
        return aid

    # -- concepts ---------------------------------------------------------

    def exists(self, logical_id: str) -> bool:
        return logical_id in self.concepts

    def kind_of(self, logical_id: str) -> ConceptKind:
        try:
            return self.concepts[logical_id][0].kind
        except KeyError:
            raise NotFoundError(f"unknown concept '{logical_id}'") from None

    def create_concept(
        self,
        kind: ConceptKind,
        name: str,
        description: str,
        attributes: dict[str, Scalar] | None = None,
        valid_from: date | None = None,
        *,
        logical_id: str | None = None,
    ) -> str:
        """Record version 1 of a new logical concept, valid from `valid_from` on.

        An explicit logical_id may be supplied (fixtures, imports); it must be
        unused. Returns the logical id.
        """
        if valid_from is None:
            raise ValidationError(["valid_from is required"])
        if logical_id is None:
            logical_id = self._alloc_concept_id()
        elif logical_id in self.concepts:
            raise ConflictError(f"concept id '{logical_id}' already in use")
        version = ConceptVersion(
            logical_id=logical_id,
            version_no=1,
            kind=kind,
            name=name,
            description=description,
            attributes=dict(attributes or {}),
            interval=ValidInterval(valid_from, None),
        )
        violations = validate_concept(version)
        if violations:
            raise ValidationError(violations)
        self.concepts[logical_id] = [version]
        self._by_kind[kind].add(logical_id)
        return logical_id

    def update_concept(
        self,
        logical_id: str,
        *,
        name: str | None = None,
        description: str | None = None,
        attributes: dict[str, Scalar] | None = None,
        effective_from: date,
    ) -> int:
        """Close the open version at `effective_from` and append the changed one.

        Returns the new version number. The kind never changes. Retroactive
        updates (effective_from not after the latest start) are rejected.
        """
        versions = self.concepts.get(logical_id)
        if versions is None:
            raise NotFoundError(f"unknown concept '{logical_id}'")
        latest = versions[-1]
        if not latest.interval.is_open:
            raise ConflictError(f"concept '{logical_id}' is retired")
        if effective_from <= latest.interval.valid_from:
            raise ConflictError(
                f"retroactive update: effective_from {effective_from} is not after "
                f"latest version start {latest.interval.valid_from}"
            )
        successor = ConceptVersion(
            logical_id=logical_id,
            version_no=latest.version_no + 1,
            kind=latest.kind,
            name=latest.name if name is None else name,
            description=latest.description if description is None else description,
            attributes=dict(latest.attributes) if attributes is None else dict(attributes),
            interval=ValidInterval(effective_from, None),
        )
        violations = validate_concept(successor)
        if violations:
            raise ValidationError(violations)
        versions[-1] = ConceptVersion(
            logical_id=latest.logical_id,
            version_no=latest.version_no,
            kind=latest.kind,
            name=latest.name,
            description=latest.description,
            attributes=latest.attributes,
            interval=ValidInterval(latest.interval.valid_from, effective_from),
        )
        versions.append(successor)
        return successor.version_no

    def retire_concept(self, logical_id: str, at: date) -> None:
        """End the object's validity at `at`; no new version is appended."""
        versions = self.concepts.get(logical_id)
        if versions is None:
            raise NotFoundError(f"unknown concept '{logical_id}'")
        latest = versions[-1]
        if not latest.interval.is_open:
            raise ConflictError(f"concept '{logical_id}' is already retired")
        if at <= latest.interval.valid_from:
            raise ConflictError(
                f"retire date {at} is not after latest version start "
                f"{latest.interval.valid_from}"
            )
        versions[-1] = ConceptVersion(
            logical_id=latest.logical_id,
            version_no=latest.version_no,
            kind=latest.kind,
            name=latest.name,
            description=latest.description,
            attributes=latest.attributes,
            interval=ValidInterval(latest.interval.valid_from, at),
        )

    def get_as_of(self, logical_id: str, t: date) -> ConceptVersion | None:
        """The unique version covering t, or None (also for unknown ids)."""
        versions = self.concepts.get(logical_id)
        if not versions:
            return None
        return _as_of(versions, t)

    def get_history(self, logical_id: str) -> list[ConceptVersion]:
        """All versions in ascending valid_from order."""
        versions = self.concepts.get(logical_id)
        if versions is None:
            raise NotFoundError(f"unknown concept '{logical_id}'")
        return list(versions)

    def ids_of_kind(self, kind: ConceptKind) -> list[str]:
        """Logical ids of every concept of the exact kind, sorted."""
        return sorted(self._by_kind[kind])

    def find_concepts(
        self,
        kind: ConceptKind | None = None,
        name: str | None = None,
        t: date | None = None,
    ) -> list[ConceptVersion]:
        """Concept versions alive at t (required) matching the exact kind/name.

        Result is ordered by logical id.
        """
        if t is None:
            raise ValidationError(["an as-of date is required"])
        ids = self._by_kind[kind] if kind is not None else self.concepts.keys()
        out = []
        for logical_id in sorted(ids):
            version = _as_of(self.concepts[logical_id], t)
            if version is None:
                continue
            if name is not None and version.name != name:
                continue
            out.append(version)
        return out

    # -- associations -----------------------------------------------------

    def create_association(
        self,
        kind: AssociationKind,
        src: str,
        dst: str,
        valid_from: date,
        *,
        assoc_id: str | None = None,
    ) -> str:
        """Record an open-ended association. Both endpoints must exist, with
        kinds admitted by the constraint table; endpoint versions need not
        cover valid_from (liveness is enforced at traversal time)."""
        if src not in self.concepts:
            raise NotFoundError(f"unknown concept '{src}'")
        if dst not in self.concepts:
            raise NotFoundError(f"unknown concept '{dst}'")
        if assoc_id is None:
            assoc_id = self._alloc_assoc_id()
        elif assoc_id in self.associations:
            raise ConflictError(f"association id '{assoc_id}' already in use")
        assoc = AssociationVersion(
            assoc_id=assoc_id,
            kind=kind,
            src=src,
            dst=dst,
            interval=ValidInterval(valid_from, None),
        )
        violations = validate_association(assoc, self.kind_of(src), self.kind_of(dst))
        if violations:
            raise ValidationError(violations)
        self.associations[assoc_id] = assoc
        self._incident.setdefault((src, kind, "forward"), set()).add(assoc_id)
        self._incident.setdefault((dst, kind, "reverse"), set()).add(assoc_id)
        return assoc_id

    def end_association(self, assoc_id: str, at: date) -> None:
        assoc = self.associations.get(assoc_id)
        if assoc is None:
            raise NotFoundError(f"unknown association '{assoc_id}'")
        if not assoc.interval.is_open:
            raise ConflictError(f"association '{assoc_id}' already ended")
        if at <= assoc.interval.valid_from:
            raise ConflictError(
                f"end date {at} is not after association start {assoc.interval.valid_from}"
            )
        self.associations[assoc_id] = AssociationVersion(
            assoc_id=assoc.assoc_id,
            kind=assoc.kind,
            src=assoc.src,
            dst=assoc.dst,
            interval=ValidInterval(assoc.interval.valid_from, at),
        )

    def get_association(self, assoc_id: str) -> AssociationVersion:
        assoc = self.associations.get(assoc_id)
        if assoc is None:
            raise NotFoundError(f"unknown association '{assoc_id}'")
        return assoc

    # -- temporal traversal -------------------------------------------------

    def traverse(
        self,
        logical_id: str,
        kind: AssociationKind,
        direction: Direction,
        t: date,
    ) -> set[str]:
        """Far endpoints of `kind` associations incident to the object whose
        interval covers t and whose far endpoint is alive at t. Deduplicated."""
        if logical_id not in self.concepts:
            raise NotFoundError(f"unknown concept '{logical_id}'")
        result = set()
        for assoc_id in self._incident.get((logical_id, kind, direction), ()):
            assoc = self.associations[assoc_id]
            if not assoc.interval.covers(t):
                continue
            far = assoc.dst if direction == "forward" else assoc.src
            if _as_of(self.concepts[far], t) is not None:
                result.add(far)
        return result

    def traverse_during(
        self,
        logical_id: str,
        kind: AssociationKind,
        direction: Direction,
        window: ValidInterval,
    ) -> set[str]:
        """Like traverse, with overlap semantics: an association is admitted if
        its interval overlaps the window and the far endpoint has a version
        overlapping the window."""
        if logical_id not in self.concepts:
            raise NotFoundError(f"unknown concept '{logical_id}'")
        result = set()
        for assoc_id in self._incident.get((logical_id, kind, direction), ()):
            assoc = self.associations[assoc_id]
            if not assoc.interval.overlaps(window):
                continue
            far = assoc.dst if direction == "forward" else assoc.src
            if any(v.interval.overlaps(window) for v in self.concepts[far]):
                result.add(far)
        return result

    def extend_chain(self, logical_id: str, versions: list[ConceptVersion]) -> None:
        """Append pre-built versions to a chain (import path). Versions must
        be sorted by version_no and continue any existing chain; the merged
        chain is checked against all invariants."""
        existing = self.concepts.get(logical_id, [])
        if existing and any(v.version_no <= existing[-1].version_no for v in versions):
            raise ConflictError(f"version already present for '{logical_id}'")
        chain = list(existing) + list(versions)
        problems = _check_chain(logical_id, chain)
        if problems:
            raise ValidationError(problems)
        self.concepts[logical_id] = chain
        self._by_kind[chain[0].kind].add(logical_id)

    # -- bookkeeping --------------------------------------------------------

    def max_known_date(self) -> date | None:
        """Latest date mentioned by any interval bound in the store."""
        latest: date | None = None
        bounds: list[date] = []
        for versions in self.concepts.values():
            for v in versions:
                bounds.append(v.interval.valid_from)
                if v.interval.valid_to is not None:
                    bounds.append(v.interval.valid_to)
        for assoc in self.associations.values():
            bounds.append(assoc.interval.valid_from)
            if assoc.interval.valid_to is not None:
                bounds.append(assoc.interval.valid_to)
        for b in bounds:
            if latest is None or b > latest:
                latest = b
        return latest

    def check_invariants(self) -> list[str]:
        """Verify every version chain: disjoint ordered intervals, contiguous
        version numbering, constant kind, at most one open tail (and last)."""
        problems = []
        for logical_id, versions in self.concepts.items():
            problems.extend(_check_chain(logical_id, versions))
        for assoc_id, assoc in self.associations.items():
            if assoc.interval.valid_to is not None and not (
                assoc.interval.valid_from < assoc.interval.valid_to
            ):
                problems.append(f"association '{assoc_id}': empty or inverted interval")
        return problems


def _check_chain(logical_id: str, versions: list[ConceptVersion]) -> list[str]:
    problems = []
    if not versions:
        problems.append(f"concept '{logical_id}': empty version list")
        return problems
    kind = versions[0].kind
    for i, v in enumerate(versions):
        if v.version_no != i + 1:
            problems.append(
                f"concept '{logical_id}': version_no {v.version_no} at position {i}"
            )
        if v.kind != kind:
            problems.append(f"concept '{logical_id}': kind changed across versions")
        if v.interval.valid_to is None:
            if i != len(versions) - 1:
                problems.append(f"concept '{logical_id}': open interval before the tail")
        elif not v.interval.valid_from < v.interval.valid_to:
            problems.append(f"concept '{logical_id}': empty or inverted interval")
        if i > 0:
            prev = versions[i - 1]
            if prev.interval.valid_to is None or prev.interval.valid_to > v.interval.valid_from:
                problems.append(
                    f"concept '{logical_id}': versions {i} and {i + 1} overlap or disorder"
                )
    return problems
