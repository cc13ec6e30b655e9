"""Near-linear-time constant-factor edit distance approximation with exact oracles."""

from .driver import RunReport, approx_ed, main
from .exact import EditOp, EditScript, banded_ed, exact_alignment, exact_ed
from .params import ParamSet, derive_params

__all__ = [
    "EditOp",
    "EditScript",
    "ParamSet",
    "RunReport",
    "approx_ed",
    "banded_ed",
    "derive_params",
    "exact_alignment",
    "exact_ed",
    "main",
]
