"""
Active-set Newton solver for the l1/l2-penalized smoothed-hinge SVM.

The outer loop drives the smoothing parameter eps down by a factor beta.
At each eps, Newton steps are taken on the active coordinates with an
exact l1 line search and an Armijo safeguard; once the Newton decrement
falls below eps / newton_tol_factor the activation set is refreshed or,
if it is unchanged, eps is reduced.
"""
import logging
import time
from dataclasses import dataclass, replace
from enum import Enum
from typing import NamedTuple, Optional, Tuple

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve, pinvh

from smsvm.core.errors import (
    ArmijoStallError,
    DimensionMismatchError,
    LinearSolveError,
    NumericalFailure,
    SolverError,
)
from smsvm.core.params import HyperParams
from smsvm.core.report import SolveReport
from smsvm.core.types import Dataset, SolverState
from smsvm.optim.linesearch import LineSearchProblem, minimize_quadratic_l1
from smsvm.optim.loss import gradient_smooth, hessian_active, hessian_factor_active, objective_penalized

logger = logging.getLogger(__name__)


class StepStatus(str, Enum):
    STEP = "step"
    CONVERGED = "converged"
    RETRY = "retry"


@dataclass(frozen=True)
class NewtonWork:
    g: np.ndarray
    g_tilde: np.ndarray
    d: np.ndarray
    # None when the direction came from the sample-space solve
    H_active: Optional[np.ndarray]
    active: np.ndarray
    curvature: float = 0.0


@dataclass(frozen=True)
class StepInfo:
    status: StepStatus
    gradient: np.ndarray
    decrement: float = 0.0
    step: float = 0.0
    zero_index: Optional[int] = None
    tied: Tuple[int, ...] = ()
    halvings: int = 0
    objective_before: Optional[float] = None
    objective_after: Optional[float] = None
    added_to_inactive: int = 0
    flagged: Tuple[int, ...] = ()


class StepResult(NamedTuple):
    w: np.ndarray
    state: SolverState
    info: StepInfo


def activation_scan(g: np.ndarray, inactive: np.ndarray, mu: float) -> np.ndarray:
    """Mask of inactive coordinates whose gradient magnitude exceeds mu."""
    return np.asarray(inactive, dtype=bool) & (np.abs(g) > mu)


def kkt_from_gradient(g: np.ndarray, w: np.ndarray, mu: float) -> float:
    support = w != 0.0
    on = np.abs(g[support] + mu * np.sign(w[support]))
    off = np.maximum(np.abs(g[~support]) - mu, 0.0)
    return float(max(on.max(initial=0.0), off.max(initial=0.0)))


def kkt_residual(
    data: Dataset,
    w: np.ndarray,
    params: HyperParams,
    eps: float,
    report: Optional[SolveReport] = None,
) -> float:
    """Largest violation of the l1 stationarity conditions of f_eps at w."""
    g = gradient_smooth(data, w, params.lam, eps, report)
    return kkt_from_gradient(g, np.asarray(w, dtype=np.float64), params.mu)


def _factor(matrix: np.ndarray, lam: float, size: int):
    try:
        return cho_factor(matrix, lower=True)
    except (LinAlgError, ValueError) as e:
        raise LinearSolveError(
            f"Newton system on {size} active coordinates is not positive definite: {e}",
            lam=lam,
        ) from e


def newton_direction(
    data: Dataset,
    state: SolverState,
    params: HyperParams,
    g: np.ndarray,
    report: Optional[SolveReport] = None,
) -> NewtonWork:
    """
    Solve H_AA d_A = -g_tilde_A on A = ~I | J; d is zero on I \\ J.

    Blocks wider than the sample count are solved through the n x n system
    lam I + B B^T, where B^T B = H_AA - lam I. Without an l2 term such a
    block has rank at most n, and d_A is the minimum-norm solution
    -pinv(B^T B) g_tilde_A = -B^T pinv(B B^T)^2 B g_tilde_A.
    """
    w = state.w
    g_tilde = g + params.mu * np.sign(w)
    # minimum-norm subgradient for candidates still sitting at zero
    fresh = state.candidates & (w == 0.0)
    g_tilde[fresh] = g[fresh] - params.mu * np.sign(g[fresh])

    active = np.flatnonzero(state.active)
    d = np.zeros_like(w)
    if active.size == 0:
        return NewtonWork(g, g_tilde, d, np.zeros((0, 0)), active)

    rhs = g_tilde[active]
    if active.size > data.n:
        B = hessian_factor_active(data, w, state.eps, active, report)
        small = (B @ B.T).toarray()
        if params.lam == 0:
            inv = pinvh(small)
            dA = -(B.T @ (inv @ (inv @ (B @ rhs))))
            Bd = B @ dA
            d[active] = dA
            return NewtonWork(g, g_tilde, d, None, active, float(Bd @ Bd))
        small[np.diag_indices(data.n)] += params.lam
        factor = _factor(small, params.lam, active.size)
        dA = -(rhs - B.T @ cho_solve(factor, B @ rhs)) / params.lam
        Bd = B @ dA
        d[active] = dA
        return NewtonWork(g, g_tilde, d, None, active, params.lam * float(dA @ dA) + float(Bd @ Bd))

    H = hessian_active(data, w, params.lam, state.eps, active, report)
    dA = -cho_solve(_factor(H, params.lam, active.size), rhs)
    d[active] = dA
    return NewtonWork(g, g_tilde, d, H, active, float(dA @ H @ dA))


def newton_step(
    data: Dataset,
    state: SolverState,
    params: HyperParams,
    report: Optional[SolveReport] = None,
    decrement_tol: Optional[float] = None,
) -> StepResult:
    """
    One Newton step at fixed (eps, I).

    Returns CONVERGED without moving when |d^T g_tilde| is below
    eps / newton_tol_factor (or decrement_tol), RETRY when the line search
    found no decrease and candidates were moved back to the frozen set,
    and STEP otherwise.
    """
    w = state.w
    g = state.grad
    if g is None:
        g = gradient_smooth(data, w, params.lam, state.eps, report)
    if not np.all(np.isfinite(g)):
        raise NumericalFailure("non-finite gradient", eps=state.eps)

    work = newton_direction(data, state, params, g, report)
    d = work.d
    decrement = float(d @ work.g_tilde)
    if not np.isfinite(decrement):
        raise NumericalFailure("non-finite Newton decrement", eps=state.eps)

    tol = state.eps / params.newton_tol_factor if decrement_tol is None else decrement_tol
    cached = replace(state, grad=g)
    if abs(decrement) < tol or not np.any(d):
        return StepResult(w, cached, StepInfo(StepStatus.CONVERGED, g, decrement=decrement))

    problem = LineSearchProblem(w=w, d=d, b=float(g @ d), a=0.5 * max(work.curvature, 0.0), mu=params.mu)
    ls = minimize_quadratic_l1(problem)

    if ls.s_star == 0.0:
        # a zero candidate moving along sign(g_j) costs mu |d_j|, not -mu |d_j|
        flagged = state.candidates & (w == 0.0) & (d * g > 0)
        if np.any(flagged):
            idx = tuple(np.flatnonzero(flagged).tolist())
            logger.debug(f"line search returned s=0; freezing candidates {idx}")
            retry = replace(
                cached,
                candidates=state.candidates & ~flagged,
                blocked=state.blocked | flagged,
                phase=state.phase + 1,
            )
            return StepResult(w, retry, StepInfo(StepStatus.RETRY, g, decrement=decrement, flagged=idx))
        logger.debug("Newton direction gives no decrease; treating (eps, I) as solved")
        return StepResult(w, cached, StepInfo(StepStatus.CONVERGED, g, decrement=decrement))

    f0 = state.objective
    if f0 is None:
        f0 = objective_penalized(data, w, params, state.eps, report)
    if not np.isfinite(f0):
        raise NumericalFailure("non-finite objective", eps=state.eps)

    s, zero_index, tied = ls.s_star, ls.zero_index, ls.tied
    w_new = _trial_point(w, d, s, zero_index)
    f_new = objective_penalized(data, w_new, params, state.eps, report)
    halvings = 0
    while not f_new <= f0 + params.c1 * s * decrement:
        if halvings >= params.armijo_max_halvings:
            raise ArmijoStallError(
                "Armijo safeguard exhausted its halvings",
                step=s,
                decrement=decrement,
                objective=f0,
                trial_objective=f_new,
            )
        s *= 0.5
        zero_index, tied = None, ()
        halvings += 1
        w_new = _trial_point(w, d, s, None)
        f_new = objective_penalized(data, w_new, params, state.eps, report)

    inactive = w_new == 0.0
    added = int(np.count_nonzero(inactive & ~state.inactive))
    new_state = SolverState(
        w=w_new,
        inactive=inactive,
        candidates=state.candidates & inactive,
        eps=state.eps,
        blocked=state.blocked,
        phase=state.phase,
        objective=f_new,
    )
    info = StepInfo(
        StepStatus.STEP,
        g,
        decrement=decrement,
        step=s,
        zero_index=zero_index,
        tied=tied,
        halvings=halvings,
        objective_before=f0,
        objective_after=f_new,
        added_to_inactive=added,
    )
    return StepResult(w_new, new_state, info)


def _trial_point(w: np.ndarray, d: np.ndarray, s: float, zero_index: Optional[int]) -> np.ndarray:
    w_new = w + s * d
    if zero_index is not None:
        w_new[zero_index] = 0.0
    return w_new


def adjust_active_set(state: SolverState, g: np.ndarray, mu: float, beta: float) -> SolverState:
    """
    Called once (eps, I) is solved: refresh the activation set from g or,
    if the scan matches the current one, reduce eps by beta.
    """
    scan = activation_scan(g, state.inactive & ~state.blocked, mu)
    if not np.array_equal(scan, state.candidates):
        return replace(state, candidates=scan, phase=state.phase + 1, grad=g)
    return replace(
        state,
        eps=state.eps / beta,
        blocked=np.zeros_like(state.blocked),
        phase=state.phase + 1,
        grad=None,
        objective=None,
    )


def _record_step(report: SolveReport, state: SolverState, info: StepInfo) -> None:
    report.objective_trace.append(info.objective_after)
    report.phase_trace.append(state.phase)
    report.inactive_added.append(info.added_to_inactive)


def polish(
    data: Dataset,
    state: SolverState,
    params: HyperParams,
    report: Optional[SolveReport] = None,
) -> Tuple[SolverState, float]:
    """
    Keep stepping at the final eps until the KKT residual reaches
    params.kkt_tol. Returns the state and its residual.

    The activation set is rescanned from the fresh gradient before every
    step. A coordinate blocked by a failed line search is released once,
    when it is the only remaining off-support violation.
    """
    kkt = float("inf")
    released = np.zeros_like(state.inactive)
    for it in range(params.polish_max_iters + 1):
        g = state.grad
        if g is None:
            g = gradient_smooth(data, state.w, params.lam, state.eps, report)
            state = replace(state, grad=g)
        kkt = kkt_from_gradient(g, state.w, params.mu)
        if kkt <= params.kkt_tol:
            break
        if it == params.polish_max_iters:
            logger.warning(f"Polishing hit polish_max_iters={params.polish_max_iters} at kkt={kkt:.3e}")
            break

        scan = activation_scan(g, state.inactive & ~state.blocked, params.mu)
        blocked = state.blocked
        if not scan.any():
            stuck = activation_scan(g, state.inactive & blocked & ~released, params.mu)
            if stuck.any():
                worst = int(np.argmax(np.where(stuck, np.abs(g), -np.inf)))
                scan[worst] = True
                released[worst] = True
                blocked = blocked.copy()
                blocked[worst] = False
        if not np.array_equal(scan, state.candidates):
            state = replace(state, candidates=scan, blocked=blocked, phase=state.phase + 1)

        try:
            _, next_state, info = newton_step(data, state, params, report, decrement_tol=0.0)
        except ArmijoStallError as e:
            logger.warning(f"Polishing stopped at kkt={kkt:.3e}: {e}")
            break
        if info.status is StepStatus.CONVERGED:
            logger.warning(f"Polishing cannot reduce kkt={kkt:.3e} below {params.kkt_tol:.1e}")
            state = next_state
            break
        if info.status is StepStatus.STEP and report is not None:
            _record_step(report, next_state, info)
        state = next_state
    return state, kkt


def svm_smooth(
    data: Dataset,
    params: HyperParams,
    w0: Optional[np.ndarray] = None,
    report: Optional[SolveReport] = None,
) -> Tuple[np.ndarray, SolveReport]:
    """
    Minimize 1/2 lam ||w||^2 + mean(psi_eps(1 - y x^T w)) + mu ||w||_1 with
    eps continuation from eps0 down to eps_min.

    Starts from w = 0 with every coordinate inactive unless a warm start
    w0 is given, in which case I is the exact-zero set of w0.
    """
    if report is None:
        report = SolveReport(method="smsvm")
    start_time = time.perf_counter()

    if w0 is None:
        w = np.zeros(data.m)
    else:
        w = np.array(w0, dtype=np.float64)
        if w.shape != (data.m,):
            raise DimensionMismatchError(f"warm start has shape {w.shape}, expected ({data.m},)")

    state = SolverState.start(w, params.eps0)
    g = gradient_smooth(data, state.w, params.lam, state.eps, report)
    state = replace(state, candidates=activation_scan(g, state.inactive, params.mu), grad=g)

    logger.info(
        f"SmSVM solve: n={data.n}, m={data.m}, lambda={params.lam:g}, mu={params.mu:g}, "
        f"eps {params.eps0:g} -> {params.eps_min:g}, {int(state.candidates.sum())} initial candidates"
    )

    threshold = params.eps_min / params.beta
    iterations = 0
    capped = False
    while state.eps > threshold:
        if iterations >= params.max_outer_iters:
            logger.warning(f"Reached max_outer_iters={params.max_outer_iters} at eps={state.eps:g}")
            capped = True
            break
        iterations += 1
        try:
            _, state, info = newton_step(data, state, params, report)
        except SolverError as e:
            e.context.update(iteration=iterations, eps=state.eps)
            logger.error(f"Newton step failed: {e}")
            raise

        if info.status is StepStatus.STEP:
            _record_step(report, state, info)
            logger.debug(
                f"iter {iterations}: s={info.step:.3e}, f={info.objective_after:.10g}, "
                f"nnz={int(np.count_nonzero(state.w))}, halvings={info.halvings}"
            )
        elif info.status is StepStatus.CONVERGED:
            eps_before = state.eps
            state = adjust_active_set(state, info.gradient, params.mu, params.beta)
            if state.eps < eps_before:
                logger.info(
                    f"eps {eps_before:.4g} solved after {iterations} iterations, "
                    f"nnz={int(np.count_nonzero(state.w))}"
                )

    if not capped:
        # the loop exits one reduction past the last eps that was optimized
        state = replace(state, eps=state.eps * params.beta, grad=None, objective=None)

    state, kkt = polish(data, state, params, report)

    report.iterations += iterations
    report.final_eps = state.eps
    report.final_kkt = kkt
    report.final_nnz = int(np.count_nonzero(state.w))
    report.wall_time = time.perf_counter() - start_time
    logger.info(
        f"SmSVM done: {iterations} iterations, nnz={report.final_nnz}, kkt={kkt:.3e}, "
        f"{report.data_passes} data passes, {report.wall_time:.3f}s"
    )
    return state.w, report
