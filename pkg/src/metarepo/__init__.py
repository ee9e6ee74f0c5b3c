"""Temporal business-metadata repository with an embedded star-schema
warehouse, cross-segment linkages, and the NavQL navigation DSL."""

from .errors import (
    ConflictError,
    MetarepoError,
    NotFoundError,
    QueryError,
    RecordError,
    ValidationError,
)
from .linkage import ActionRecord, CrossLink, LinkKind, Repository
from .model import (
    AssociationKind,
    AssociationVersion,
    ConceptKind,
    ConceptVersion,
    ValidInterval,
    validate_association,
    validate_concept,
)
from .store import Store
from .warehouse import (
    DimensionDef,
    DimensionRowVersion,
    FactDef,
    FactRow,
    QueryResult,
    Warehouse,
)

__all__ = [
    "ActionRecord",
    "AssociationKind",
    "AssociationVersion",
    "ConceptKind",
    "ConceptVersion",
    "ConflictError",
    "CrossLink",
    "DimensionDef",
    "DimensionRowVersion",
    "FactDef",
    "FactRow",
    "LinkKind",
    "MetarepoError",
    "NotFoundError",
    "QueryError",
    "QueryResult",
    "RecordError",
    "Repository",
    "Store",
    "ValidInterval",
    "ValidationError",
    "Warehouse",
    "validate_association",
    "validate_concept",
]
