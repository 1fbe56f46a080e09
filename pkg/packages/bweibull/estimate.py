# packages/bweibull/estimate.py
"""Likelihood objectives, analytic derivatives, fitting and Fisher information.

Per observation, with L = log x − log β, w = (x/β)^α and G = 1 + (1 − δx)²:

    log f = log α − log β − log Z + log G + (α − 1) L − w

The Z derivatives are exact in α (the Γ(1 + k/α) factors are differentiated
through digamma and trigamma).
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import optimize

from packages.bweibull import specfun
from packages.bweibull.dist import BWeibull, ParamVector, log_normalizing_constant, log_pdf_values
from packages.bweibull.errors import DomainError, FitError
from packages.bweibull.harmony import harmony_search
from packages.bweibull.models import Convention, Dataset, FisherMethod, FitResult, HarmonyConfig
from packages.bweibull.quadrature import integrate_vector
from packages.shared.log import get_logger
from packages.shared.settings import settings

log = get_logger(__name__)

DataLike = Union[Dataset, Sequence[float], np.ndarray]

_BOUND_FRACTION = 1e-6
_POLISH_PENALTY = 1e100
_TRACE_TAIL = 10


def _as_array(data: DataLike, min_n: int = 1) -> np.ndarray:
    values = data.values if isinstance(data, Dataset) else data
    x = np.asarray(values, dtype=float).ravel()
    if x.size < min_n:
        raise DomainError(f"need at least {min_n} observations, got {x.size}")
    if np.any(~(x > 0)) or not np.all(np.isfinite(x)):
        raise DomainError("observations must be positive finite reals")
    return x


# ---------- objectives ----------

def log_likelihood(theta: ParamVector, data: DataLike) -> float:
    x = _as_array(data)
    return float(np.sum(log_pdf_values(theta.alpha, theta.beta, theta.delta, x, theta.log_z)))


def _logq(log_f: np.ndarray, q: float) -> np.ndarray:
    """log_q f = (f^{1−q} − 1)/(1 − q), evaluated from log f."""
    with np.errstate(over="ignore", invalid="ignore"):
        return np.expm1((1.0 - q) * log_f) / (1.0 - q)


def logq_likelihood(theta: ParamVector, data: DataLike, q: float) -> float:
    if q == 1:
        raise DomainError("log_q likelihood needs q != 1; use log_likelihood")
    x = _as_array(data)
    lf = log_pdf_values(theta.alpha, theta.beta, theta.delta, x, theta.log_z)
    return float(np.sum(_logq(lf, q)))


def _objective(x: np.ndarray, q: float) -> Callable[[np.ndarray], float]:
    def value(v: np.ndarray) -> float:
        a, b, d = (float(t) for t in v)
        if not (a > 0 and b > 0):
            return -np.inf
        lz = log_normalizing_constant(a, b, d)
        if not np.isfinite(lz):
            return -np.inf
        lf = log_pdf_values(a, b, d, x, lz)
        total = float(np.sum(lf)) if q == 1 else float(np.sum(_logq(lf, q)))
        return total if np.isfinite(total) else -np.inf

    return value


# ---------- normalizing-constant derivatives ----------

def _gamma_factors(alpha: float) -> Tuple[float, float, float, float, float, float]:
    """Γ(1+1/α), Γ(1+2/α) and their first and second α-derivatives."""
    a1, a2 = 1.0 + 1.0 / alpha, 1.0 + 2.0 / alpha
    g1, g2 = specfun.gamma(a1), specfun.gamma(a2)
    p1, p2 = specfun.digamma(a1), specfun.digamma(a2)
    t1, t2 = specfun.trigamma(a1), specfun.trigamma(a2)
    a_2, a_3, a_4 = alpha ** 2, alpha ** 3, alpha ** 4
    d1 = -g1 * p1 / a_2
    d2 = -2.0 * g2 * p2 / a_2
    dd1 = 2.0 * g1 * p1 / a_3 + g1 * (p1 * p1 + t1) / a_4
    dd2 = 4.0 * g2 * p2 / a_3 + 4.0 * g2 * (p2 * p2 + t2) / a_4
    return g1, g2, d1, d2, dd1, dd2


def normalizing_derivatives(theta: ParamVector) -> Tuple[float, np.ndarray, np.ndarray]:
    """(Z, ∇Z, ∇²Z) with respect to (α, β, δ)."""
    b, d = theta.beta, theta.delta
    g1, g2, d1, d2, dd1, dd2 = _gamma_factors(theta.alpha)
    z = 2.0 + d * d * b * b * g2 - 2.0 * d * b * g1
    grad = np.array([
        d * d * b * b * d2 - 2.0 * d * b * d1,
        2.0 * d * d * b * g2 - 2.0 * d * g1,
        2.0 * d * b * b * g2 - 2.0 * b * g1,
    ])
    z_ab = 2.0 * d * d * b * d2 - 2.0 * d * d1
    z_ad = 2.0 * d * b * b * d2 - 2.0 * b * d1
    z_bd = 4.0 * d * b * g2 - 2.0 * g1
    hess = np.array([
        [d * d * b * b * dd2 - 2.0 * d * b * dd1, z_ab, z_ad],
        [z_ab, 2.0 * d * d * g2, z_bd],
        [z_ad, z_bd, 2.0 * b * b * g2],
    ])
    return float(z), grad, hess


def _log_z_derivatives(theta: ParamVector) -> Tuple[np.ndarray, np.ndarray]:
    z, grad, hess = normalizing_derivatives(theta)
    return grad / z, hess / z - np.outer(grad, grad) / (z * z)


# ---------- score / hessian ----------

def observation_scores(theta: ParamVector, data: DataLike) -> np.ndarray:
    """n × 3 matrix of per-observation scores ∂ log f(x_i)/∂(α, β, δ)."""
    x = _as_array(data)
    a, b, d = theta.alpha, theta.beta, theta.delta
    dlz, _ = _log_z_derivatives(theta)
    with np.errstate(over="ignore", invalid="ignore"):
        L = np.log(x) - np.log(b)
        w = np.exp(a * L)
        u = 1.0 - d * x
        g = 1.0 + u * u
        s_alpha = 1.0 / a - dlz[0] + L - w * L
        s_beta = -a / b - dlz[1] + a * w / b
        s_delta = -dlz[2] - 2.0 * x * u / g
    return np.column_stack([s_alpha, s_beta, s_delta])


def score(theta: ParamVector, data: DataLike) -> np.ndarray:
    return observation_scores(theta, data).sum(axis=0)


def logq_score(theta: ParamVector, data: DataLike, q: float) -> np.ndarray:
    """Gradient of the log_q likelihood, Σ f(x_i)^{1−q} ∂ log f(x_i)."""
    x = _as_array(data)
    s = observation_scores(theta, x)
    if q == 1:
        return s.sum(axis=0)
    lf = log_pdf_values(theta.alpha, theta.beta, theta.delta, x, theta.log_z)
    with np.errstate(over="ignore", invalid="ignore"):
        weight = np.exp((1.0 - q) * lf)
    return (weight[:, None] * s).sum(axis=0)


def hessian(theta: ParamVector, data: DataLike) -> np.ndarray:
    x = _as_array(data)
    n = x.size
    a, b, d = theta.alpha, theta.beta, theta.delta
    _, hlz = _log_z_derivatives(theta)
    with np.errstate(over="ignore", invalid="ignore"):
        L = np.log(x) - np.log(b)
        w = np.exp(a * L)
        u = 1.0 - d * x
        g = 1.0 + u * u
        h = -n * hlz
        h[0, 0] += np.sum(-1.0 / (a * a) - w * L * L)
        h[0, 1] += np.sum(-1.0 / b + a * w * L / b + w / b)
        h[1, 1] += np.sum(a / (b * b) - a * (a + 1.0) * w / (b * b))
        # ∂²log G/∂δ² = 2x²(1 − u²)/G²
        h[2, 2] += np.sum(2.0 * x * x * (1.0 - u * u) / (g * g))
    h[1, 0] = h[0, 1]
    return 0.5 * (h + h.T)


# ---------- Fisher information ----------

class FisherInformation(NamedTuple):
    matrix: np.ndarray
    converged: np.ndarray  # 3 × 3 flags, False where a quadrature entry did not converge
    method: FisherMethod


def _fisher_analytic(theta: ParamVector) -> FisherInformation:
    dist = BWeibull(theta)
    a, b, d = theta.alpha, theta.beta, theta.delta
    _, hlz = _log_z_derivatives(theta)
    lb = np.log(b)
    ba = b ** a
    m0 = dist.e_xalpha()
    m1 = dist.e_xalpha_log()
    m2 = dist.e_xalpha_log2()
    e_w = m0 / ba
    e_wl = (m1 - lb * m0) / ba
    e_wl2 = (m2 - 2.0 * lb * m1 + lb * lb * m0) / ba

    g_dd = dist.expect(lambda t: 2.0 * t * t * (1.0 - (1.0 - d * t) ** 2) / (1.0 + (1.0 - d * t) ** 2) ** 2)

    f = hlz.copy()
    f[0, 0] += 1.0 / (a * a) + e_wl2
    f[0, 1] += 1.0 / b - a * e_wl / b - e_w / b
    f[1, 1] += -a / (b * b) + a * (a + 1.0) * e_w / (b * b)
    f[2, 2] -= g_dd.value
    f[1, 0] = f[0, 1]
    ok = np.ones((3, 3), dtype=bool)
    ok[2, 2] = g_dd.converged
    if not g_dd.converged:
        log.warning("fisher.quad_unconverged", entry="delta_delta", abserr=g_dd.abserr)
    return FisherInformation(0.5 * (f + f.T), ok, FisherMethod.ANALYTIC)


def _score_outer_integral(theta: ParamVector, q: float) -> Tuple[np.ndarray, bool]:
    """∫ s(x) s(x)ᵀ f(x)^{2−q} dx by vector quadrature."""
    a, b, d = theta.alpha, theta.beta, theta.delta
    lz = theta.log_z

    def integrand(t: float) -> np.ndarray:
        if not t > 0:
            return np.zeros(9)
        lf = float(log_pdf_values(a, b, d, np.asarray(t), lz))
        if lf == -np.inf:
            return np.zeros(9)
        s = observation_scores(theta, np.array([t]))[0]
        with np.errstate(over="ignore", invalid="ignore"):
            out = np.outer(s, s).ravel() * np.exp((2.0 - q) * lf)
        return np.where(np.isfinite(out), out, 0.0)

    val, _, ok = integrate_vector(integrand, 0.0, np.inf, breakpoints=BWeibull(theta).breakpoints())
    m = val.reshape(3, 3)
    return 0.5 * (m + m.T), ok


def fisher_information_detail(theta: ParamVector, *, method: FisherMethod = FisherMethod.ANALYTIC) -> FisherInformation:
    if method == FisherMethod.QUADRATURE:
        m, ok = _score_outer_integral(theta, 1.0)
        return FisherInformation(m, np.full((3, 3), ok), FisherMethod.QUADRATURE)
    if method != FisherMethod.ANALYTIC:
        raise DomainError(f"unsupported Fisher method {method}")
    return _fisher_analytic(theta)


def fisher_information(theta: ParamVector, n: int = 1) -> np.ndarray:
    """Expected information of n observations, n·(−E[∂² log f])."""
    return n * fisher_information_detail(theta).matrix


def q_fisher_information(theta: ParamVector, q: float, n: int = 1) -> np.ndarray:
    """n·∫ s sᵀ f^{2−q} dx; q = 1 gives the classical information."""
    m, ok = _score_outer_integral(theta, float(q))
    if not ok:
        log.warning("fisher.q_quad_unconverged", q=q, theta=theta.as_array().tolist())
    return n * m


class StandardErrors(NamedTuple):
    values: np.ndarray
    method: FisherMethod
    finite: bool


def standard_errors(fisher: np.ndarray, n: int = 1, *, method: FisherMethod = FisherMethod.ANALYTIC) -> StandardErrors:
    """Square roots of diag((n F)⁻¹); ill-conditioned matrices go through the pseudo-inverse."""
    f = n * np.asarray(fisher, dtype=float)
    if f.shape != (3, 3) or not np.all(np.isfinite(f)):
        return StandardErrors(np.full(3, np.nan), method, False)
    if not np.allclose(f, f.T, rtol=1e-10, atol=1e-12 * max(1.0, float(np.max(np.abs(f))))):
        raise DomainError("Fisher information must be symmetric")
    cond = np.linalg.cond(f)
    if not cond <= settings.SE_COND_LIMIT:
        cov = np.linalg.pinv(f, hermitian=True)
        method = FisherMethod.PSEUDO_INVERSE
        log.info("fisher.pseudo_inverse", cond=float(cond))
    else:
        cov = np.linalg.inv(f)
    diag = np.diag(cov)
    finite = bool(np.all(diag >= 0))
    with np.errstate(invalid="ignore"):
        ses = np.where(diag >= 0, np.sqrt(np.abs(diag)), np.nan)
    if not finite:
        log.warning("fisher.negative_variance", diagonal=diag.tolist())
    return StandardErrors(ses, method, finite)


def published_standard_errors(fisher: np.ndarray, n: int) -> StandardErrors:
    """sqrt(diag(F⁻¹))/n for per-observation information F.

    This is the scale of the parenthesised errors in the published fit tables,
    a factor 1/√n below `standard_errors`.
    """
    if n < 1:
        raise DomainError("n must be positive")
    se = standard_errors(fisher, n)
    return se._replace(values=se.values / np.sqrt(n))


# ---------- fitting ----------

def derive_seed(seed: int, k: int) -> int:
    """Independent child seed k of a run seed."""
    if seed < 0 or k < 0:
        raise DomainError("seeds must be nonnegative")
    return int(np.random.SeedSequence([seed, k]).generate_state(1)[0])


def _distinct_top(memory: np.ndarray, values: np.ndarray, k: int) -> List[np.ndarray]:
    order = np.argsort(values)[::-1]
    picked: List[np.ndarray] = []
    for i in order:
        if not np.isfinite(values[i]):
            break
        if any(np.allclose(memory[i], p, rtol=1e-9, atol=0.0) for p in picked):
            continue
        picked.append(memory[i].copy())
        if len(picked) == k:
            break
    return picked


def _polish(x: np.ndarray, q: float, starts: List[np.ndarray], bounds: List[Tuple[float, float]]) -> Tuple[Optional[np.ndarray], float]:
    """L-BFGS-B ascent with the analytic gradient from each start; best end point wins."""
    n = x.size
    value = _objective(x, q)

    def neg(v: np.ndarray) -> Tuple[float, np.ndarray]:
        val = value(v)
        if not np.isfinite(val):
            return _POLISH_PENALTY, np.zeros(3)
        theta = ParamVector.from_array(v)
        g = logq_score(theta, x, q)
        if not np.all(np.isfinite(g)):
            return _POLISH_PENALTY, np.zeros(3)
        return -val, -g

    best, best_val = None, -np.inf
    for start in starts:
        try:
            res = optimize.minimize(
                neg, start, jac=True, method="L-BFGS-B", bounds=bounds,
                options={"maxiter": settings.POLISH_MAX_STEPS, "gtol": 1e-6 * n},
            )
        except (ArithmeticError, ValueError) as exc:
            log.debug("fit.polish_error", start=start.tolist(), error=str(exc))
            continue
        v = value(res.x)
        if np.isfinite(v) and v > best_val:
            best, best_val = np.asarray(res.x, dtype=float), v
    return best, best_val


def _at_bound(v: np.ndarray, bounds: List[Tuple[float, float]]) -> bool:
    for t, (lo, hi) in zip(v, bounds):
        tol = _BOUND_FRACTION * (hi - lo)
        if t - lo <= tol or hi - t <= tol:
            return True
    return False


def fit(data: DataLike, q: float = 1.0, config: Optional[HarmonyConfig] = None) -> FitResult:
    """Maximise ℓ (q = 1) or ℓ_q by Harmony Search, then polish and attach standard errors."""
    x = _as_array(data, min_n=3)
    if not q > 0:
        raise DomainError("q must be positive")
    config = config or HarmonyConfig()
    if len(config.bounds) != 3:
        raise DomainError("bounds must cover (alpha, beta, delta)")
    n = x.size

    hs = harmony_search(_objective(x, q), config)
    starts = _distinct_top(hs.memory, hs.memory_values, settings.POLISH_TOP_K)
    polished, polished_val = _polish(x, q, starts or [hs.best], config.bounds)

    polish_failed = polished is None or polished_val < hs.value
    if polish_failed:
        log.warning("fit.polish_failed", q=q, hs_value=hs.value, polished_value=polished_val)
        best, best_val = hs.best, hs.value
    else:
        best, best_val = polished, polished_val
    if not np.isfinite(best_val):
        raise FitError("no finite objective value found")

    theta = ParamVector.from_array(best)
    at_bound = _at_bound(best, config.bounds)
    if at_bound:
        log.info("fit.at_bound", theta=best.tolist())

    try:
        info = fisher_information_detail(theta)
        if not np.all(np.isfinite(info.matrix)):
            info = fisher_information_detail(theta, method=FisherMethod.QUADRATURE)
    except (DomainError, ArithmeticError) as exc:
        log.warning("fit.fisher_failed", error=str(exc))
        info = FisherInformation(np.full((3, 3), np.nan), np.zeros((3, 3), dtype=bool), FisherMethod.ANALYTIC)
    se = standard_errors(info.matrix, n, method=info.method)
    published_se = published_standard_errors(info.matrix, n)

    grad = logq_score(theta, x, q)
    result = FitResult(
        theta_hat=theta,
        standard_errors=tuple(float(s) for s in se.values),
        published_standard_errors=tuple(float(s) for s in published_se.values),
        q=q,
        objective_value=best_val,
        log_likelihood=log_likelihood(theta, x),
        iterations=len(hs.trace),
        fisher=(n * info.matrix).tolist(),
        fisher_method=se.method,
        standard_errors_finite=se.finite and bool(np.all(np.isfinite(se.values))),
        polish_failed=polish_failed,
        at_bound=at_bound,
        score_norm=float(np.max(np.abs(grad))),
        seed=config.seed,
        trace_tail=hs.trace[-_TRACE_TAIL:],
    )
    log.info("fit.done", q=q, n=n, theta=best.tolist(), objective=best_val, polish_failed=polish_failed)
    return result


class QSelection(NamedTuple):
    q: float
    fit: FitResult
    scan: List[Dict[str, float]]


def select_q(
    data: DataLike,
    q_grid: Optional[Sequence[float]] = None,
    config: Optional[HarmonyConfig] = None,
    *,
    convention: Convention = Convention.STANDARD,
    max_workers: Optional[int] = None,
) -> QSelection:
    """Fit at every q and keep the one with the largest KS p-value.

    Ties go to the larger CVM p-value, then to the q closest to 1. Fit k of the
    grid runs with seed derive_seed(config.seed, k).
    """
    from packages.bweibull.gof import goodness_of_fit

    x = _as_array(data, min_n=3)
    grid = [float(q) for q in (settings.Q_GRID if q_grid is None else q_grid)]
    if not grid:
        raise DomainError("q grid must not be empty")
    if any(not 0 < q <= 1 for q in grid):
        raise DomainError("q grid values must lie in (0, 1]")
    config = config or HarmonyConfig()
    workers = max_workers or settings.MAX_WORKERS

    def one(k: int) -> Tuple[FitResult, float, float]:
        cfg = config.model_copy(update={"seed": derive_seed(config.seed, k)})
        res = fit(x, grid[k], cfg)
        g = goodness_of_fit(x, BWeibull(res.theta_hat), convention)
        return res, g.ks_pvalue, g.cvm_pvalue

    if workers > 1 and len(grid) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, range(len(grid))))
    else:
        results = [one(k) for k in range(len(grid))]

    scan = [
        {"q": q, "ks_pvalue": ks_p, "cvm_pvalue": cvm_p, "objective_value": res.objective_value}
        for q, (res, ks_p, cvm_p) in zip(grid, results)
    ]
    best = max(range(len(grid)), key=lambda k: (results[k][1], results[k][2], -abs(grid[k] - 1.0)))
    log.info("select_q.done", selected=grid[best], ks_pvalue=results[best][1])
    return QSelection(grid[best], results[best][0], scan)
