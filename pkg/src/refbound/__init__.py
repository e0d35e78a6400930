"""Degree and discriminant bounds for fields of definition of arithmetic
Kleinian reflection groups, with a census of small totally real fields."""

__version__ = "0.1.0"

from .bounds import BoundInputs, DomainError, FieldShape, LocalData  # noqa: E402
from .engine import ConstraintState, Verdict, exclude_degree, max_degree  # noqa: E402
from .oracle import BoundResult, SignatureQuery, poitou_local_bound, table_lookup  # noqa: E402

__all__ = [
    "BoundInputs",
    "BoundResult",
    "ConstraintState",
    "DomainError",
    "FieldShape",
    "LocalData",
    "SignatureQuery",
    "Verdict",
    "exclude_degree",
    "max_degree",
    "poitou_local_bound",
    "table_lookup",
]
