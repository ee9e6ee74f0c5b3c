"""Cross-segment linkages and named navigation methods.

The Repository bundles the metadata store, the warehouse, and the versioned
links between them: concept-to-dimension, concept-to-dimension-row,
measure-to-fact-column, and action-to-target-row. Navigation methods are a
fixed dispatch table over the association traversals, so an instance can be
explored by method name; data-to-metadata lookups go the other way, from a
dimension row back to the concepts describing it.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date
from enum import Enum

from .errors import ConflictError, NotFoundError, QueryError, ValidationError
from .model import (
    ALL_KINDS,
    ENTITY_KINDS,
    AssociationKind,
    ConceptKind,
    ValidInterval,
)
from .store import Store
from .warehouse import DimensionRowVersion, Warehouse


class LinkKind(str, Enum):
    CONCEPT_DIMENSION = "ConceptDimension"
    CONCEPT_DIM_ROW = "ConceptDimRow"
    MEASURE_FACT = "MeasureFact"
    ACTION_DIM_ROW = "ActionDimRow"


@dataclass(frozen=True)
class CrossLink:
    """A versioned link from a concept to a warehouse object.

    Exactly one target shape per kind: dimension name, (dimension, key),
    or (fact, column).
    """

    link_id: str
    kind: LinkKind
    concept_id: str
    dimension: str | None
    key: str | None
    fact: str | None
    column: str | None
    interval: ValidInterval


@dataclass(frozen=True)
class ActionRecord:
    """Everything created by record_action; free_standing flags an action
    with neither evaluations nor targets."""

    action_id: str
    association_ids: tuple[str, ...]
    link_ids: tuple[str, ...]
    free_standing: bool


# Navigation dispatch: method -> entries of (kinds it applies to,
# association kind, traversal direction). Methods valid for several source
# kinds dispatch on the instance's kind.
_GOAL = frozenset({ConceptKind.GOAL})
_PROCESS = frozenset({ConceptKind.PROCESS})
_MEASURE = frozenset({ConceptKind.MEASURE})
NAV_DISPATCH: dict[str, tuple[tuple[frozenset[ConceptKind], AssociationKind, str], ...]] = {
    "getSubEntity": ((ENTITY_KINDS, AssociationKind.SUB_ENTITY, "forward"),),
    "getSubGoals": ((_GOAL, AssociationKind.SUB_GOAL, "forward"),),
    "getSubProcesses": ((_PROCESS, AssociationKind.SUB_PROCESS, "forward"),),
    "getProcesses": ((ENTITY_KINDS, AssociationKind.ENTITY_PROCESS, "forward"),),
    "getGoals": (
        (ENTITY_KINDS, AssociationKind.E_GOAL, "forward"),
        (_PROCESS, AssociationKind.P_GOAL, "forward"),
        (_MEASURE, AssociationKind.GOAL_MEASURE, "reverse"),
    ),
    "getMeasures": ((_GOAL, AssociationKind.GOAL_MEASURE, "forward"),),
    "getEvaluation": (
        (_GOAL, AssociationKind.EVAL_GOAL, "reverse"),
        (_MEASURE, AssociationKind.EVAL_MEASURE, "reverse"),
    ),
    "getAffectingEvents": ((ALL_KINDS, AssociationKind.EVENT_IMPACTS, "reverse"),),
    "getActionsTaken": ((ALL_KINDS, AssociationKind.ACTION_CONCEPT, "reverse"),),
}

#: Kinds whose instance menu offers the metadata-to-data hop.
DIMENSION_MAPPABLE_KINDS = ENTITY_KINDS | {ConceptKind.BUSINESS_CONCEPT}


def navigation_methods(kind: ConceptKind) -> list[str]:
    """Concept-to-concept methods applicable to a kind, sorted by name."""
    return sorted(
        method
        for method, entries in NAV_DISPATCH.items()
        if any(kind in kinds for kinds, _, _ in entries)
    )


def advertised_methods(kind: ConceptKind) -> list[str]:
    """The full per-kind method menu: navigation methods plus the data hops
    (getDimension, getFacts) and history."""
    methods = navigation_methods(kind)
    if kind in DIMENSION_MAPPABLE_KINDS:
        methods.append("getDimension")
    if kind is ConceptKind.MEASURE:
        methods.append("getFacts")
    methods.append("history")
    return sorted(methods)


def _dispatch(kind: ConceptKind, method: str) -> tuple[AssociationKind, str]:
    entries = NAV_DISPATCH.get(method)
    if entries is None:
        raise QueryError(f"unknown navigation method '{method}'")
    for kinds, assoc_kind, direction in entries:
        if kind in kinds:
            return assoc_kind, direction
    raise QueryError(
        f"method '{method}' is not valid for kind {kind.value}; "
        f"valid methods: {', '.join(navigation_methods(kind))}"
    )


class Repository:
    """Metadata store + warehouse + cross-links, navigated as one graph."""

    def __init__(self) -> None:
        self.store = Store()
        self.warehouse = Warehouse()
        self.links: dict[str, CrossLink] = {}
        self._next_link = 1

    # -- links -----------------------------------------------------------

    def link(
        self,
        kind: LinkKind,
        concept_id: str,
        target,
        valid_from: date,
        *,
        link_id: str | None = None,
    ) -> str:
        """Record an open-ended cross-link.

        Target shape per kind: ConceptDimension takes a dimension name;
        ConceptDimRow and ActionDimRow take (dimension, key); MeasureFact
        takes (fact, column).
        """
        if not self.store.exists(concept_id):
            raise NotFoundError(f"unknown concept '{concept_id}'")
        concept_kind = self.store.kind_of(concept_id)
        dimension = key = fact = column = None
        if kind is LinkKind.CONCEPT_DIMENSION:
            dimension = target
            self._require_dimension(dimension)
        elif kind in (LinkKind.CONCEPT_DIM_ROW, LinkKind.ACTION_DIM_ROW):
            dimension, key = target
            self._require_dim_row(dimension, key)
            if kind is LinkKind.ACTION_DIM_ROW and concept_kind is not ConceptKind.ACTION:
                raise ValidationError(
                    [f"{kind.value} requires an Action concept, got {concept_kind.value}"]
                )
        elif kind is LinkKind.MEASURE_FACT:
            fact, column = target
            fact_def = self.warehouse.facts.get(fact)
            if fact_def is None:
                raise NotFoundError(f"unknown fact '{fact}'")
            if column not in fact_def.measures:
                raise NotFoundError(f"fact '{fact}' has no measure column '{column}'")
            if concept_kind is not ConceptKind.MEASURE:
                raise ValidationError(
                    [f"{kind.value} requires a Measure concept, got {concept_kind.value}"]
                )
        else:
            raise QueryError(f"unknown link kind '{kind}'")
        if link_id is None:
            while f"x{self._next_link}" in self.links:
                self._next_link += 1
            link_id = f"x{self._next_link}"
            self._next_link += 1
        elif link_id in self.links:
            raise ConflictError(f"link id '{link_id}' already in use")
        self.links[link_id] = CrossLink(
            link_id=link_id,
            kind=kind,
            concept_id=concept_id,
            dimension=dimension,
            key=key,
            fact=fact,
            column=column,
            interval=ValidInterval(valid_from, None),
        )
        return link_id

    def end_link(self, link_id: str, at: date) -> None:
        link = self.links.get(link_id)
        if link is None:
            raise NotFoundError(f"unknown link '{link_id}'")
        if not link.interval.is_open:
            raise ConflictError(f"link '{link_id}' already ended")
        if at <= link.interval.valid_from:
            raise ConflictError(
                f"end date {at} is not after link start {link.interval.valid_from}"
            )
        self.links[link_id] = CrossLink(
            link_id=link.link_id,
            kind=link.kind,
            concept_id=link.concept_id,
            dimension=link.dimension,
            key=link.key,
            fact=link.fact,
            column=link.column,
            interval=ValidInterval(link.interval.valid_from, at),
        )

    def _require_dimension(self, dimension: str) -> None:
        if dimension not in self.warehouse.dimensions:
            raise NotFoundError(f"unknown dimension '{dimension}'")

    def _require_dim_row(self, dimension: str, key: str) -> None:
        self._require_dimension(dimension)
        if key not in self.warehouse.dim_rows[dimension]:
            raise NotFoundError(f"dimension '{dimension}' has no row with key '{key}'")

    # -- navigation --------------------------------------------------------

    def navigate(self, logical_id: str, method: str, t: date) -> set[str]:
        """Follow a named navigation method at time t."""
        assoc_kind, direction = _dispatch(self.store.kind_of(logical_id), method)
        return self.store.traverse(logical_id, assoc_kind, direction, t)

    def navigate_during(self, logical_id: str, method: str, window: ValidInterval) -> set[str]:
        """Follow a named navigation method with overlap semantics."""
        assoc_kind, direction = _dispatch(self.store.kind_of(logical_id), method)
        return self.store.traverse_during(logical_id, assoc_kind, direction, window)

    def get_dimension(self, entity_id: str, t: date) -> tuple[str, list[DimensionRowVersion]]:
        """Resolve the concept's dimension link at t and return the dimension
        name plus its row versions covering t."""
        if not self.store.exists(entity_id):
            raise NotFoundError(f"unknown concept '{entity_id}'")
        candidates = [
            link
            for link in self.links.values()
            if link.kind is LinkKind.CONCEPT_DIMENSION
            and link.concept_id == entity_id
            and link.interval.covers(t)
        ]
        if not candidates:
            raise NotFoundError(f"concept '{entity_id}' is not dimension-mapped at {t}")
        link = min(candidates, key=lambda x: x.link_id)
        assert link.dimension is not None
        return link.dimension, self.warehouse.rows_as_of(link.dimension, t)

    def get_facts(self, measure_id: str, t: date) -> tuple[str, str]:
        """Resolve the measure's (fact table, measure column) link at t."""
        if not self.store.exists(measure_id):
            raise NotFoundError(f"unknown concept '{measure_id}'")
        candidates = [
            link
            for link in self.links.values()
            if link.kind is LinkKind.MEASURE_FACT
            and link.concept_id == measure_id
            and link.interval.covers(t)
        ]
        if not candidates:
            raise NotFoundError(f"measure '{measure_id}' is not fact-mapped at {t}")
        link = min(candidates, key=lambda x: x.link_id)
        assert link.fact is not None and link.column is not None
        return link.fact, link.column

    def fact_to_measures(self, fact: str, t: date) -> set[str]:
        """Measure concepts whose fact link points at this table at t."""
        if fact not in self.warehouse.facts:
            raise NotFoundError(f"unknown fact '{fact}'")
        return {
            link.concept_id
            for link in self.links.values()
            if link.kind is LinkKind.MEASURE_FACT
            and link.fact == fact
            and link.interval.covers(t)
        }

    def row_to_concepts(self, dimension: str, key: str, t: date) -> set[str]:
        """Data-to-metadata hop: concepts linked to this row at t, plus
        concepts linked to the row's whole dimension at t."""
        result = set()
        for link in self.links.values():
            if not link.interval.covers(t):
                continue
            if (
                link.kind is LinkKind.CONCEPT_DIM_ROW
                and link.dimension == dimension
                and link.key == key
            ):
                result.add(link.concept_id)
            elif link.kind is LinkKind.CONCEPT_DIMENSION and link.dimension == dimension:
                result.add(link.concept_id)
        return result

    def actions_targeting(self, dimension: str, key: str, t: date) -> set[str]:
        """Action concepts holding a target link to this row at t."""
        return {
            link.concept_id
            for link in self.links.values()
            if link.kind is LinkKind.ACTION_DIM_ROW
            and link.dimension == dimension
            and link.key == key
            and link.interval.covers(t)
        }

    # -- recording judgments and decisions -------------------------------

    def record_evaluation(
        self,
        goal_id: str,
        measure_id: str | None,
        text: str,
        at: date,
        provenance: str | None = None,
    ) -> str:
        """Record a performance judgment against a goal (and optionally the
        measure it was derived from). The conclusion becomes the evaluation's
        name; provenance, such as the query that produced the evidence, is
        kept in the description."""
        if goal_id is None:
            raise ValidationError(["an evaluation must attach to a goal"])
        if not self.store.exists(goal_id):
            raise NotFoundError(f"unknown concept '{goal_id}'")
        if self.store.kind_of(goal_id) is not ConceptKind.GOAL:
            raise ValidationError(
                [f"evaluation must attach to a Goal, got {self.store.kind_of(goal_id).value}"]
            )
        if measure_id is not None:
            if not self.store.exists(measure_id):
                raise NotFoundError(f"unknown concept '{measure_id}'")
            if self.store.kind_of(measure_id) is not ConceptKind.MEASURE:
                raise ValidationError(
                    [
                        f"evaluation measure must be a Measure, "
                        f"got {self.store.kind_of(measure_id).value}"
                    ]
                )
        evaluation_id = self.store.create_concept(
            ConceptKind.EVALUATION, text, provenance or "", {}, at
        )
        self.store.create_association(AssociationKind.EVAL_GOAL, evaluation_id, goal_id, at)
        if measure_id is not None:
            self.store.create_association(
                AssociationKind.EVAL_MEASURE, evaluation_id, measure_id, at
            )
        return evaluation_id

    def record_action(
        self,
        evaluation_ids: list[str],
        text: str,
        targets: list[tuple[str, str]],
        at: date,
    ) -> ActionRecord:
        """Record a business decision: an Action concept, one association per
        causing evaluation, and one target link per (dimension, key) row."""
        for evaluation_id in evaluation_ids:
            if not self.store.exists(evaluation_id):
                raise NotFoundError(f"unknown concept '{evaluation_id}'")
            if self.store.kind_of(evaluation_id) is not ConceptKind.EVALUATION:
                raise ValidationError(
                    [
                        f"action causes must be Evaluations, "
                        f"got {self.store.kind_of(evaluation_id).value}"
                    ]
                )
        for dimension, key in targets:
            self._require_dim_row(dimension, key)
        action_id = self.store.create_concept(ConceptKind.ACTION, text, "", {}, at)
        association_ids = tuple(
            self.store.create_association(
                AssociationKind.ACTION_FROM_EVAL, evaluation_id, action_id, at
            )
            for evaluation_id in evaluation_ids
        )
        link_ids = tuple(
            self.link(LinkKind.ACTION_DIM_ROW, action_id, (dimension, key), at)
            for dimension, key in targets
        )
        return ActionRecord(
            action_id=action_id,
            association_ids=association_ids,
            link_ids=link_ids,
            free_standing=not evaluation_ids and not targets,
        )

    # -- bookkeeping --------------------------------------------------------

    def max_known_date(self) -> date | None:
        bounds = [self.store.max_known_date(), self.warehouse.max_known_date()]
        for link in self.links.values():
            bounds.append(link.interval.valid_from)
            bounds.append(link.interval.valid_to)
        dates = [b for b in bounds if b is not None]
        return max(dates) if dates else None

    def check_invariants(self) -> list[str]:
        problems = self.store.check_invariants() + self.warehouse.check_invariants()
        for link_id, link in self.links.items():
            if link.interval.valid_to is not None and not (
                link.interval.valid_from < link.interval.valid_to
            ):
                problems.append(f"link '{link_id}': empty or inverted interval")
            if not self.store.exists(link.concept_id):
                problems.append(f"link '{link_id}': unknown concept '{link.concept_id}'")
        return problems
