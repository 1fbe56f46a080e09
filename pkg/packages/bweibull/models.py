# packages/bweibull/models.py
from __future__ import annotations

from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from packages.bweibull.dist import ParamVector, TailRate
from packages.shared.settings import settings

# non-finite floats (diverged SEs, -inf entropies) survive a JSON round trip
_INF_NAN = ConfigDict(ser_json_inf_nan="constants")


# ---------- modality ----------

class Classification(str, Enum):
    BIMODAL = "Bimodal"
    UNIMODAL = "Unimodal"
    DECREASING = "Decreasing"
    INDETERMINATE = "Indeterminate"


class ModalityMethod(str, Enum):
    ALPHA1_RULE = "Alpha1Rule"
    ALPHA2_DISCRIMINANT = "Alpha2Discriminant"
    NUMERIC = "Numeric"


class CriticalPoint(BaseModel):
    x: float
    kind: str  # "max" | "min"


class ModalityReport(BaseModel):
    classification: Classification
    critical_points: List[CriticalPoint] = Field(default_factory=list)
    method: ModalityMethod
    discriminant: Optional[float] = None
    coefficients: Optional[Tuple[float, float, float, float, float]] = None
    auxiliary: Dict[str, float] = Field(default_factory=dict)
    note: Optional[str] = None

    @property
    def maxima(self) -> List[float]:
        return [c.x for c in self.critical_points if c.kind == "max"]


# ---------- entropy ----------

class EntropyMethod(str, Enum):
    CLOSED_FORM = "ClosedForm"
    SERIES = "Series"
    QUADRATURE = "Quadrature"


class EntropyValue(BaseModel):
    """`value` is always the quadrature result; `method` names the analytic layer checked against it."""

    model_config = _INF_NAN

    value: float
    method: EntropyMethod
    analytic_value: Optional[float] = None
    series_terms: Optional[int] = None
    hypothesis_met: bool = True
    quadrature_converged: bool = True


# ---------- estimation ----------

class HarmonyConfig(BaseModel):
    memory_size: int = Field(default_factory=lambda: settings.HS_MEMORY_SIZE, ge=2)
    memory_consider_rate: float = Field(default_factory=lambda: settings.HS_HMCR, gt=0, lt=1)
    pitch_adjust_rate: float = Field(default_factory=lambda: settings.HS_PAR, gt=0, lt=1)
    # absolute bandwidth per dimension; None -> HS_BANDWIDTH_FRACTION * (high - low)
    bandwidth: Optional[List[float]] = None
    # when set, bandwidth decays geometrically to this fraction of its start
    bandwidth_final_fraction: Optional[float] = Field(default=None, gt=0, le=1)
    max_iterations: int = Field(default_factory=lambda: settings.HS_MAX_ITERATIONS, ge=1)
    bounds: List[Tuple[float, float]] = Field(default_factory=settings.default_bounds)
    seed: int = Field(default_factory=lambda: settings.DEFAULT_SEED)

    @field_validator("bounds")
    @classmethod
    def _check_bounds(cls, v: List[Tuple[float, float]]) -> List[Tuple[float, float]]:
        if not v:
            raise ValueError("bounds must not be empty")
        for lo, hi in v:
            if not lo < hi:
                raise ValueError(f"bound low {lo} must be < high {hi}")
        return v

    @model_validator(mode="after")
    def _check_bandwidth(self) -> "HarmonyConfig":
        if self.bandwidth is not None and len(self.bandwidth) != len(self.bounds):
            raise ValueError("bandwidth needs one entry per bounded dimension")
        return self

    def bandwidths(self) -> List[float]:
        if self.bandwidth is not None:
            return list(self.bandwidth)
        return [settings.HS_BANDWIDTH_FRACTION * (hi - lo) for lo, hi in self.bounds]


class FisherMethod(str, Enum):
    ANALYTIC = "Analytic"
    QUADRATURE = "Quadrature"
    PSEUDO_INVERSE = "PseudoInverse"


class FitResult(BaseModel):
    model_config = _INF_NAN

    theta_hat: ParamVector
    standard_errors: Tuple[float, float, float]
    # sqrt(diag(F⁻¹))/n, the scale of the published tables
    published_standard_errors: Tuple[float, float, float] = (float("nan"),) * 3
    q: float = 1.0
    objective_value: float
    log_likelihood: float
    iterations: int
    # expected information of the whole sample, n·F(θ̂)
    fisher: List[List[float]]
    fisher_method: FisherMethod
    standard_errors_finite: bool = True
    polish_failed: bool = False
    at_bound: bool = False
    score_norm: Optional[float] = None
    seed: int
    trace_tail: List[float] = Field(default_factory=list)


# ---------- goodness of fit ----------

class Convention(str, Enum):
    STANDARD = "standard"
    PUBLISHED = "published"

    @classmethod
    def _missing_(cls, value: object) -> Optional["Convention"]:
        if value == "paper":
            return cls.PUBLISHED
        return None


class GofResult(BaseModel):
    model_config = _INF_NAN

    ks_stat: float = Field(ge=0)
    ks_pvalue: float = Field(ge=0, le=1)
    cvm_stat: float = Field(ge=0)
    cvm_pvalue: float = Field(ge=0, le=1)
    convention: Convention
    ks_method: Optional[str] = None


# ---------- data ----------

class Dataset(BaseModel):
    values: List[float]
    label: str
    source: Optional[str] = None
    sha256: Optional[str] = None

    @field_validator("values")
    @classmethod
    def _positive(cls, v: List[float]) -> List[float]:
        if len(v) < 3:
            raise ValueError("a dataset needs at least 3 observations")
        for x in v:
            if not (x > 0 and x < float("inf")):
                raise ValueError(f"observation {x!r} is not a positive finite real")
        return v

    @property
    def n(self) -> int:
        return len(self.values)


# ---------- report ----------

class DatasetDescriptor(BaseModel):
    label: str
    n: int
    source: Optional[str] = None
    sha256: Optional[str] = None


class EntropySummary(BaseModel):
    model_config = _INF_NAN

    shannon: EntropyValue
    quadratic: EntropyValue
    tsallis: Optional[EntropyValue] = None
    tsallis_q: Optional[float] = None


class ModelReport(BaseModel):
    """One row of a fitted-model table."""

    model_config = _INF_NAN

    model: str = "BWeibull"
    estimator: str  # "MLE" | "MLqE"
    fit: FitResult
    gof: List[GofResult]
    modality: ModalityReport
    entropies: EntropySummary
    tail_rate: TailRate


class Report(BaseModel):
    model_config = _INF_NAN

    tool: str = "bweibull"
    version: str
    seed: int
    dataset: DatasetDescriptor
    selected_q: Optional[float] = None
    q_scan: List[Dict[str, float]] = Field(default_factory=list)
    models: List[ModelReport]
    timing_sec: Optional[float] = None
