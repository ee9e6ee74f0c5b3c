"""Metadata type system: concept kinds, typed associations, valid-time intervals.

Everything here is a plain value; validation returns violation lists rather
than raising, so callers can decide whether a bad candidate is an error.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date
from enum import Enum


class ConceptKind(str, Enum):
    """Business-metadata categories. All kinds other than the generic
    BUSINESS_CONCEPT are specializations of it and inherit its fields."""

    BUSINESS_CONCEPT = "BusinessConcept"
    FUNCTION = "Function"
    EXTERNAL_EVENT = "ExternalEvent"
    INTERNAL_ENTITY = "InternalEntity"
    EXTERNAL_ENTITY = "ExternalEntity"
    PROCESS = "Process"
    GOAL = "Goal"
    MEASURE = "Measure"
    EVALUATION = "Evaluation"
    ACTION = "Action"


#: Kinds playing the abstract "Entity" role.
ENTITY_KINDS = frozenset({ConceptKind.INTERNAL_ENTITY, ConceptKind.EXTERNAL_ENTITY})

#: Every kind specializes BusinessConcept, so "any business concept" admits all.
ALL_KINDS = frozenset(ConceptKind)


def is_entity(kind: ConceptKind) -> bool:
    return kind in ENTITY_KINDS


@dataclass(frozen=True)
class ValidInterval:
    """Half-open valid-time interval [valid_from, valid_to) at day granularity.

    ``valid_to is None`` means the interval is open-ended.
    """

    valid_from: date
    valid_to: date | None = None

    @property
    def is_open(self) -> bool:
        return self.valid_to is None

    def covers(self, t: date) -> bool:
        """True iff valid_from <= t < valid_to."""
        if t < self.valid_from:
            return False
        return self.valid_to is None or t < self.valid_to

    def overlaps(self, other: ValidInterval) -> bool:
        """True iff the two half-open intervals share at least one day."""
        if other.valid_to is not None and other.valid_to <= self.valid_from:
            return False
        if self.valid_to is not None and self.valid_to <= other.valid_from:
            return False
        return True


class AssociationKind(str, Enum):
    """Typed, directed links between concepts."""

    SUB_ENTITY = "SubEntity"
    SUB_PROCESS = "SubProcess"
    SUB_GOAL = "SubGoal"
    P_GOAL = "PGoal"
    E_GOAL = "EGoal"
    ENTITY_PROCESS = "EntityProcess"
    GOAL_MEASURE = "GoalMeasure"
    EVAL_GOAL = "EvalGoal"
    EVAL_MEASURE = "EvalMeasure"
    EVAL_CONCEPT = "EvalConcept"
    ACTION_FROM_EVAL = "ActionFromEval"
    EVAL_FROM_ACTION = "EvalFromAction"
    ACTION_CONCEPT = "ActionConcept"
    EVENT_IMPACTS = "EventImpacts"
    EVENT_RELATED = "EventRelated"
    ATTRIBUTE_SPEC = "AttributeSpec"


# Endpoint constraint table: kind -> (admissible source kinds, admissible
# target kinds). Total over AssociationKind; every instance is checked here.
_K = ConceptKind
ASSOCIATION_ENDPOINTS: dict[AssociationKind, tuple[frozenset[ConceptKind], frozenset[ConceptKind]]] = {
    AssociationKind.SUB_ENTITY: (ENTITY_KINDS, ENTITY_KINDS),
    AssociationKind.SUB_PROCESS: (frozenset({_K.PROCESS}), frozenset({_K.PROCESS})),
    AssociationKind.SUB_GOAL: (frozenset({_K.GOAL}), frozenset({_K.GOAL})),
    AssociationKind.P_GOAL: (frozenset({_K.PROCESS}), frozenset({_K.GOAL})),
    AssociationKind.E_GOAL: (ENTITY_KINDS, frozenset({_K.GOAL})),
    AssociationKind.ENTITY_PROCESS: (ENTITY_KINDS, frozenset({_K.PROCESS})),
    AssociationKind.GOAL_MEASURE: (frozenset({_K.GOAL}), frozenset({_K.MEASURE})),
    AssociationKind.EVAL_GOAL: (frozenset({_K.EVALUATION}), frozenset({_K.GOAL})),
    AssociationKind.EVAL_MEASURE: (frozenset({_K.EVALUATION}), frozenset({_K.MEASURE})),
    AssociationKind.EVAL_CONCEPT: (frozenset({_K.EVALUATION}), ALL_KINDS),
    AssociationKind.ACTION_FROM_EVAL: (frozenset({_K.EVALUATION}), frozenset({_K.ACTION})),
    AssociationKind.EVAL_FROM_ACTION: (frozenset({_K.ACTION}), frozenset({_K.EVALUATION})),
    AssociationKind.ACTION_CONCEPT: (frozenset({_K.ACTION}), ALL_KINDS),
    AssociationKind.EVENT_IMPACTS: (frozenset({_K.EXTERNAL_EVENT}), ALL_KINDS),
    AssociationKind.EVENT_RELATED: (frozenset({_K.EXTERNAL_EVENT}), frozenset({_K.EXTERNAL_EVENT})),
    # Target is the generic kind: the attribute definition itself is recorded
    # as a plain BusinessConcept instance.
    AssociationKind.ATTRIBUTE_SPEC: (ENTITY_KINDS, frozenset({_K.BUSINESS_CONCEPT})),
}

#: Attribute values are restricted to these scalar types.
Scalar = str | int | float | date


@dataclass(frozen=True)
class ConceptVersion:
    """One immutable version of a logical business-metadata object."""

    logical_id: str
    version_no: int
    kind: ConceptKind
    name: str
    description: str
    attributes: dict[str, Scalar] = field(default_factory=dict)
    interval: ValidInterval = field(default_factory=lambda: ValidInterval(date.min))


@dataclass(frozen=True)
class AssociationVersion:
    """One immutable version of a typed, directed link between two concepts."""

    assoc_id: str
    kind: AssociationKind
    src: str
    dst: str
    interval: ValidInterval


def validate_interval(interval: ValidInterval) -> list[str]:
    violations = []
    if interval.valid_to is not None and not interval.valid_from < interval.valid_to:
        violations.append(
            f"interval start {interval.valid_from} must precede end {interval.valid_to}"
        )
    return violations


def validate_concept(candidate: ConceptVersion) -> list[str]:
    """Check a single concept version in isolation; empty list means valid.

    Chain-level rules (version numbering, constant kind) are the store's job.
    """
    violations = validate_interval(candidate.interval)
    if candidate.version_no < 1:
        violations.append(f"version_no must be >= 1, got {candidate.version_no}")
    if candidate.attributes and not is_entity(candidate.kind):
        violations.append(
            f"attributes restricted to Entity kinds, got {candidate.kind.value}"
        )
    for attr, value in candidate.attributes.items():
        # bool is an int subclass but is not a scalar attribute value
        if isinstance(value, bool) or not isinstance(value, (str, int, float, date)):
            violations.append(
                f"attribute '{attr}' must be text, number, or date, "
                f"got {type(value).__name__}"
            )
    return violations


def validate_association(
    candidate: AssociationVersion,
    src_kind: ConceptKind,
    dst_kind: ConceptKind,
) -> list[str]:
    """Check an association version against the endpoint constraint table."""
    violations = validate_interval(candidate.interval)
    src_ok, dst_ok = ASSOCIATION_ENDPOINTS[candidate.kind]
    if src_kind not in src_ok:
        violations.append(
            f"{candidate.kind.value} source must be one of "
            f"{sorted(k.value for k in src_ok)}, got {src_kind.value}"
        )
    if dst_kind not in dst_ok:
        violations.append(
            f"{candidate.kind.value} target must be one of "
            f"{sorted(k.value for k in dst_ok)}, got {dst_kind.value}"
        )
    return violations
