# packages/bweibull/harmony.py
from __future__ import annotations

from typing import Callable, List, NamedTuple

import numpy as np

from packages.bweibull.errors import OptimizationError
from packages.bweibull.models import HarmonyConfig
from packages.shared.log import get_logger

log = get_logger(__name__)

Objective = Callable[[np.ndarray], float]


class HarmonyResult(NamedTuple):
    best: np.ndarray
    value: float
    trace: List[float]
    memory: np.ndarray
    memory_values: np.ndarray


def _safe(objective: Objective, x: np.ndarray) -> float:
    try:
        v = float(objective(x))
    except (ArithmeticError, ValueError):
        return -np.inf
    return v if np.isfinite(v) else -np.inf


def harmony_search(objective: Objective, config: HarmonyConfig) -> HarmonyResult:
    """Maximise `objective` over the box in `config.bounds` with canonical Harmony Search.

    Non-finite objective values count as -inf. Each iteration improvises one
    harmony dimension by dimension (memory consideration with probability HMCR,
    pitch adjustment with probability PAR, otherwise a uniform draw) and replaces
    the worst memory entry when it improves on it.
    """
    rng = np.random.default_rng(config.seed)
    lo = np.array([b[0] for b in config.bounds], dtype=float)
    hi = np.array([b[1] for b in config.bounds], dtype=float)
    dim = lo.size
    hms = config.memory_size
    bw = np.asarray(config.bandwidths(), dtype=float)
    decay = 1.0
    if config.bandwidth_final_fraction is not None and config.max_iterations > 1:
        decay = config.bandwidth_final_fraction ** (1.0 / (config.max_iterations - 1))

    memory = rng.uniform(lo, hi, size=(hms, dim))
    scores = np.array([_safe(objective, h) for h in memory])
    if not np.any(np.isfinite(scores)):
        raise OptimizationError(
            f"every initial harmony is infeasible (memory_size={hms}, bounds={config.bounds})"
        )

    best_i = int(np.argmax(scores))
    best_val = float(scores[best_i])
    best = memory[best_i].copy()
    trace: List[float] = []

    for it in range(config.max_iterations):
        pick = memory[rng.integers(0, hms, size=dim), np.arange(dim)]
        consider = rng.random(dim) < config.memory_consider_rate
        adjust = (rng.random(dim) < config.pitch_adjust_rate) & consider
        fresh = rng.uniform(lo, hi)
        shift = bw * rng.uniform(-1.0, 1.0, size=dim)

        cand = np.where(consider, pick, fresh)
        cand = np.where(adjust, cand + shift, cand)
        cand = np.clip(cand, lo, hi)

        val = _safe(objective, cand)
        worst = int(np.argmin(scores))
        if val > scores[worst]:
            memory[worst] = cand
            scores[worst] = val
            if val > best_val:
                best_val, best = val, cand.copy()
        trace.append(best_val)
        bw = bw * decay

    log.debug("hs.done", iterations=config.max_iterations, best=best_val, seed=config.seed)
    return HarmonyResult(best=best, value=best_val, trace=trace, memory=memory, memory_values=scores)
