# packages/bweibull/__init__.py
"""Bimodal Weibull distribution BWeibull(alpha, beta, delta) and its inference tools."""
from __future__ import annotations

__version__ = "0.1.0"

from packages.bweibull.dist import BWeibull, ParamVector, TailKind, TailRate  # noqa: E402
from packages.bweibull.errors import BWeibullError  # noqa: E402
from packages.bweibull.models import Convention, Dataset, FitResult, GofResult, HarmonyConfig  # noqa: E402

__all__ = [
    "BWeibull",
    "BWeibullError",
    "Convention",
    "Dataset",
    "FitResult",
    "GofResult",
    "HarmonyConfig",
    "ParamVector",
    "TailKind",
    "TailRate",
    "__version__",
]
