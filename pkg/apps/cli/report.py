# apps/cli/report.py
from __future__ import annotations

from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from packages.bweibull import __version__, entropy, modality
from packages.bweibull.dist import BWeibull, ParamVector, moment_sweep
from packages.bweibull.gof import goodness_of_fit
from packages.bweibull.models import (
    Convention,
    Dataset,
    DatasetDescriptor,
    EntropySummary,
    FitResult,
    ModelReport,
    Report,
)
from packages.shared.log import get_logger

log = get_logger(__name__)

# Tsallis index reported next to an MLE fit
DEFAULT_TSALLIS_Q = 2.0


def entropy_summary(theta: ParamVector, tsallis_q: Optional[float]) -> EntropySummary:
    tsallis = entropy.tsallis(theta, tsallis_q) if tsallis_q is not None else None
    return EntropySummary(
        shannon=entropy.shannon(theta),
        quadratic=entropy.quadratic(theta),
        tsallis=tsallis,
        tsallis_q=tsallis_q,
    )


def model_report(ds: Dataset, fit: FitResult, conventions: Sequence[Convention]) -> ModelReport:
    theta = fit.theta_hat
    dist = BWeibull(theta)
    gof = [goodness_of_fit(ds.values, dist, c) for c in conventions]
    return ModelReport(
        estimator="MLE" if fit.q == 1 else "MLqE",
        fit=fit,
        gof=gof,
        modality=modality.classify(theta),
        entropies=entropy_summary(theta, fit.q if fit.q != 1 else DEFAULT_TSALLIS_Q),
        tail_rate=dist.tail_rate(),
    )


def build_report(
    ds: Dataset,
    fits: List[FitResult],
    *,
    seed: int,
    conventions: Sequence[Convention],
    selected_q: Optional[float] = None,
    q_scan: Optional[List[Dict[str, float]]] = None,
    timing_sec: Optional[float] = None,
) -> Report:
    return Report(
        version=__version__,
        seed=seed,
        dataset=DatasetDescriptor(label=ds.label, n=ds.n, source=ds.source, sha256=ds.sha256),
        selected_q=selected_q,
        q_scan=q_scan or [],
        models=[model_report(ds, f, conventions) for f in fits],
        timing_sec=timing_sec,
    )


def report_table(report: Report) -> pd.DataFrame:
    """One row per (model, convention): everything a published table row carries."""
    rows = []
    for m in report.models:
        t, se = m.fit.theta_hat, m.fit.standard_errors
        for g in m.gof:
            rows.append({
                "dataset": report.dataset.label,
                "model": m.model,
                "estimator": m.estimator,
                "q": m.fit.q,
                "alpha": t.alpha,
                "beta": t.beta,
                "delta": t.delta,
                "se_alpha": se[0],
                "se_beta": se[1],
                "se_delta": se[2],
                "se_alpha_published": m.fit.published_standard_errors[0],
                "se_beta_published": m.fit.published_standard_errors[1],
                "se_delta_published": m.fit.published_standard_errors[2],
                "log_likelihood": m.fit.log_likelihood,
                "objective": m.fit.objective_value,
                "convention": g.convention.value,
                "ks": g.ks_stat,
                "ks_pvalue": g.ks_pvalue,
                "cvm": g.cvm_stat,
                "cvm_pvalue": g.cvm_pvalue,
                "modality": m.modality.classification.value,
            })
    return pd.DataFrame(rows)


# ---------- describe ----------

def curve_table(theta: ParamVector, grid: np.ndarray) -> pd.DataFrame:
    """PDF, CDF and hazard on a grid, with the Weibull(alpha, beta) reference curves."""
    dist = BWeibull(theta)
    ref = BWeibull.of(theta.alpha, theta.beta, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        return pd.DataFrame({
            "x": grid,
            "pdf": np.atleast_1d(dist.pdf(grid)),
            "cdf": np.atleast_1d(dist.cdf(grid)),
            "hazard": np.atleast_1d(dist.hazard(grid, strict=False)),
            "weibull_pdf": np.atleast_1d(ref.pdf(grid)),
            "weibull_cdf": np.atleast_1d(ref.cdf(grid)),
        })


def describe_document(theta: ParamVector, grid: np.ndarray, sweep: Optional[np.ndarray] = None) -> dict:
    dist = BWeibull(theta)
    doc = {
        "tool": "bweibull",
        "version": __version__,
        "theta": theta.model_dump(),
        "normalizing_constant": theta.z_const,
        "moments": {
            "mean": dist.mean(),
            "variance": dist.variance(),
            "skewness": dist.skewness(),
            "kurtosis": dist.kurtosis(),
        },
        "hazard_limits": list(dist.hazard_limits()),
        "tail_rate": dist.tail_rate().model_dump(mode="json"),
        "modality": modality.classify(theta).model_dump(mode="json"),
        "entropies": entropy_summary(theta, DEFAULT_TSALLIS_Q).model_dump(mode="json"),
        "curve": curve_table(theta, grid).to_dict(orient="list"),
    }
    if sweep is not None:
        doc["delta_sweep"] = moment_sweep(theta.alpha, theta.beta, sweep)
    return doc
