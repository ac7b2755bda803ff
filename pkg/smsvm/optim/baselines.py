"""
Comparison optimizers over the exact hinge objective: full subgradient
descent, mini-batch stochastic subgradient descent and Polak-Ribiere+
nonlinear conjugate gradient with a subgradient in place of the gradient.
"""
import logging
import time
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from smsvm.core.errors import BaselineError, DivergenceError
from smsvm.core.params import BaselineConfig
from smsvm.core.report import EvalKind, SolveReport, count_data_pass
from smsvm.core.types import Dataset
from smsvm.optim.loss import check_weights, objective_hinge

logger = logging.getLogger(__name__)

Objective = Callable[[np.ndarray], float]
Gradient = Callable[[np.ndarray], np.ndarray]
# (w, d, g) -> step length
LineSearchHook = Callable[[np.ndarray, np.ndarray, np.ndarray], float]


def hinge_subgradient(
    data: Dataset,
    w: np.ndarray,
    lam: float,
    batch: Optional[np.ndarray] = None,
    report: Optional[SolveReport] = None,
) -> np.ndarray:
    """
    lam w - (1/|B|) sum over i in B with 1 - y_i x_i^T w > 0 of y_i x_i.

    At margin exactly 1 the zero element of the subdifferential is used.
    Mini-batch evaluations are counted without a data pass.
    """
    w = check_weights(data, w)
    if batch is None:
        X, y = data.X, data.y
    else:
        batch = np.asarray(batch, dtype=np.intp)
        if batch.size == 0:
            raise BaselineError("subgradient requested on an empty batch")
        X, y = data.X[batch], data.y[batch]

    u = 1.0 - y * (X @ w)
    coef = np.where(u > 0.0, y, 0.0)
    count_data_pass(report, EvalKind.GRADIENT, data_pass=batch is None)
    return lam * w - (X.T @ coef) / y.shape[0]


def step_length(config: BaselineConfig, t: int) -> float:
    """eta_t for the configured schedule, t counted from 0."""
    if config.step_schedule == "decay":
        return config.step_size / (1.0 + t / config.step_decay)
    if config.step_schedule == "inverse_lambda":
        if config.lam <= 0:
            raise BaselineError("inverse_lambda schedule needs lambda > 0")
        return 1.0 / (config.lam * (t + 1))
    return config.step_size


def _initial_point(data: Dataset, w0: Optional[np.ndarray]) -> np.ndarray:
    if w0 is None:
        return np.zeros(data.m)
    return np.array(check_weights(data, w0), dtype=np.float64)


def _check_finite(w: np.ndarray, method: str, iteration: int):
    if not np.all(np.isfinite(w)):
        raise DivergenceError(f"{method} produced non-finite weights", iteration=iteration)


def _finish(report: SolveReport, w: np.ndarray, start_time: float) -> None:
    report.final_nnz = int(np.count_nonzero(w))
    report.wall_time = time.perf_counter() - start_time


class _BestIterate:
    """Tracks the lowest full hinge objective seen so far."""

    def __init__(self, data: Dataset, lam: float, report: SolveReport):
        self.data = data
        self.lam = lam
        self.report = report
        self.w: Optional[np.ndarray] = None
        self.value = np.inf

    def offer(self, w: np.ndarray, iteration: int) -> None:
        f = objective_hinge(self.data, w, self.lam, self.report)
        if not np.isfinite(f):
            raise DivergenceError("non-finite hinge objective", iteration=iteration)
        self.report.objective_trace.append(f)
        if f < self.value:
            self.value, self.w = f, w.copy()


def subgradient_descent(
    data: Dataset,
    config: BaselineConfig,
    w0: Optional[np.ndarray] = None,
    report: Optional[SolveReport] = None,
) -> Tuple[np.ndarray, SolveReport]:
    report = report or SolveReport(method=config.method)
    start_time = time.perf_counter()
    w = _initial_point(data, w0)
    best = _BestIterate(data, config.lam, report) if config.keep_best else None
    if best is not None:
        best.offer(w, 0)

    for t in range(config.max_iters):
        g = hinge_subgradient(data, w, config.lam, report=report)
        report.iterations += 1
        if np.linalg.norm(g) <= config.gtol:
            logger.info(f"Subgradient vanished after {t} iterations")
            break
        w = w - step_length(config, t) * g
        _check_finite(w, "subgradient descent", t)
        if best is not None:
            best.offer(w, t + 1)

    if best is not None:
        w = best.w
    final = objective_hinge(data, w, config.lam, report)
    if not np.isfinite(final):
        raise DivergenceError("non-finite hinge objective", iteration=report.iterations)
    _finish(report, w, start_time)
    logger.info(f"Subgradient descent: {report.iterations} iterations, objective {final:.6g}")
    return w, report


def sgd(
    data: Dataset,
    config: BaselineConfig,
    w0: Optional[np.ndarray] = None,
    report: Optional[SolveReport] = None,
) -> Tuple[np.ndarray, SolveReport]:
    """
    Mini-batch subgradient descent. Each epoch draws a fresh permutation and
    walks it in batches of batch_size (rows of a batch in ascending order),
    so batch_size = n reproduces subgradient_descent. max_iters counts steps;
    data_passes is the number of rows visited divided by n.
    """
    if config.batch_size > data.n:
        raise BaselineError(f"batch_size {config.batch_size} exceeds n={data.n}")
    report = report or SolveReport(method=config.method)
    start_time = time.perf_counter()
    rng = np.random.default_rng(config.seed)
    w = _initial_point(data, w0)
    best = _BestIterate(data, config.lam, report) if config.keep_best else None

    t = 0
    epoch = 0
    rows = 0
    while t < config.max_iters:
        perm = rng.permutation(data.n)
        for start in range(0, data.n, config.batch_size):
            if t >= config.max_iters:
                break
            batch = np.sort(perm[start:start + config.batch_size])
            g = hinge_subgradient(data, w, config.lam, batch=batch, report=report)
            rows += batch.size
            w = w - step_length(config, t) * g
            _check_finite(w, "sgd", t)
            t += 1
        epoch += 1
        if best is not None:
            best.offer(w, t)

    report.iterations += t
    # partial epochs count as the fraction of rows they visited
    report.data_passes += rows / data.n
    if best is not None:
        w = best.w
    _finish(report, w, start_time)
    logger.info(f"SGD: {t} steps over {epoch} epochs (batch {config.batch_size})")
    return w, report


def pr_plus_beta(g: np.ndarray, g_prev: np.ndarray) -> float:
    """max(0, g^T (g - g_prev) / ||g_prev||^2); 0 when g_prev vanishes."""
    denom = float(g_prev @ g_prev)
    if denom == 0.0:
        return 0.0
    return max(0.0, float(g @ (g - g_prev)) / denom)


@dataclass
class CGResult:
    w: np.ndarray
    fun: float
    iterations: int
    converged: bool


def nonlinear_cg(
    fun: Objective,
    grad: Gradient,
    w0: np.ndarray,
    line_search: Optional[LineSearchHook] = None,
    max_iters: int = 1000,
    gtol: float = 1e-10,
    c1: float = 1e-4,
    max_halvings: int = 40,
    trace: Optional[list] = None,
) -> CGResult:
    """
    Polak-Ribiere+ nonlinear conjugate gradient.

    Without a line_search hook, steps backtrack by halving from s = 1 until
    the Armijo condition holds. The direction is reset to -g whenever it
    is not a descent direction.
    """
    w = np.array(w0, dtype=np.float64)
    f = fun(w)
    g = grad(w)
    d = -g
    converged = False
    k = 0
    for k in range(max_iters):
        if np.linalg.norm(g) <= gtol:
            converged = True
            break
        slope = float(g @ d)
        if slope >= 0:
            d = -g
            slope = -float(g @ g)

        if line_search is not None:
            s = float(line_search(w, d, g))
            w_new = w + s * d
            f_new = fun(w_new)
        else:
            s = 1.0
            w_new = w + d
            f_new = fun(w_new)
            halvings = 0
            while not f_new <= f + c1 * s * slope and halvings < max_halvings:
                s *= 0.5
                halvings += 1
                w_new = w + s * d
                f_new = fun(w_new)

        if not np.isfinite(f_new) or not np.all(np.isfinite(w_new)):
            raise DivergenceError("conjugate gradient produced non-finite values", iteration=k)
        if line_search is None and not f_new <= f + c1 * s * slope:
            logger.info(f"CG backtracking found no decrease at iteration {k}; stopping")
            break

        g_new = grad(w_new)
        d = -g_new + pr_plus_beta(g_new, g) * d
        w, f, g = w_new, f_new, g_new
        if trace is not None:
            trace.append(f)
    else:
        k = max_iters
    return CGResult(w=w, fun=f, iterations=k, converged=converged)


def cg_polak_ribiere_plus(
    data: Dataset,
    config: BaselineConfig,
    w0: Optional[np.ndarray] = None,
    report: Optional[SolveReport] = None,
) -> Tuple[np.ndarray, SolveReport]:
    """method "cg" minimizes the plain mean hinge; "cg_l2" adds 1/2 lam ||w||^2."""
    report = report or SolveReport(method=config.method)
    start_time = time.perf_counter()
    lam = config.lam if config.method == "cg_l2" else 0.0

    def fun(w: np.ndarray) -> float:
        return objective_hinge(data, w, lam, report)

    def grad(w: np.ndarray) -> np.ndarray:
        return hinge_subgradient(data, w, lam, report=report)

    result = nonlinear_cg(
        fun,
        grad,
        _initial_point(data, w0),
        max_iters=config.max_iters,
        gtol=config.gtol,
        c1=config.c1,
        max_halvings=config.max_halvings,
        trace=report.objective_trace,
    )
    report.iterations += result.iterations
    _finish(report, result.w, start_time)
    logger.info(f"PR+ CG ({config.method}): {result.iterations} iterations, objective {result.fun:.6g}")
    return result.w, report


BASELINES = {
    "subgrad": subgradient_descent,
    "sgd": sgd,
    "cg": cg_polak_ribiere_plus,
    "cg_l2": cg_polak_ribiere_plus,
}


def run_baseline(
    data: Dataset,
    config: BaselineConfig,
    w0: Optional[np.ndarray] = None,
    report: Optional[SolveReport] = None,
) -> Tuple[np.ndarray, SolveReport]:
    return BASELINES[config.method](data, config, w0, report)
