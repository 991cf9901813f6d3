"""Exact rank, regularity and uniformity computations for forms over small finite fields."""

from .errors import (
    BudgetExceeded,
    PreconditionFailed,
    StrengthLabError,
)
from .field import FieldCtx, FieldElement, get_field, parse_field
from .poly import Polynomial, format_poly, parse_poly
from .rank import RankValue, collection_rank, relative_rank, schmidt_rank
from .multilinear import MultilinearForm, partition_rank, polarize
from .tower import Tower, check_regularity, regularize
from .variety import Locus, codim_estimate, dim_estimate, rt_check, singular_locus
from .gowers import bias, gowers_norm

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded",
    "PreconditionFailed",
    "StrengthLabError",
    "FieldCtx",
    "FieldElement",
    "get_field",
    "parse_field",
    "Polynomial",
    "format_poly",
    "parse_poly",
    "RankValue",
    "collection_rank",
    "relative_rank",
    "schmidt_rank",
    "MultilinearForm",
    "partition_rank",
    "polarize",
    "Tower",
    "check_regularity",
    "regularize",
    "Locus",
    "codim_estimate",
    "dim_estimate",
    "rt_check",
    "singular_locus",
    "bias",
    "gowers_norm",
]
