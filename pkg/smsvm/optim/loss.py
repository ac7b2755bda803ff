"""
Smoothed hinge loss psi_eps(u) = (u + sqrt(eps^2 + u^2)) / 2 and the
objective, gradient and active-block Hessian it induces over a dataset.

Every objective, gradient or Hessian evaluation recomputes the margins
from one sweep over the rows and is recorded as one data pass on the
optional SolveReport.
"""
import logging
from typing import Optional, Union

import numpy as np
import scipy.sparse as sp

from smsvm.core.errors import DimensionMismatchError
from smsvm.core.params import HyperParams
from smsvm.core.report import EvalKind, SolveReport, count_data_pass
from smsvm.core.types import Dataset

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]


def smoothed_hinge(u: ArrayLike, eps: float) -> ArrayLike:
    """
    psi_eps(u); equals max(0, u) exactly for eps = 0.

    For u < 0 the sum u + sqrt(eps^2 + u^2) is rewritten as
    eps^2 / (sqrt(eps^2 + u^2) - u) to avoid cancellation.
    """
    u = np.asarray(u, dtype=np.float64)
    h = np.hypot(eps, u)
    with np.errstate(divide="ignore", invalid="ignore"):
        tail = np.where(u < 0, eps * eps / (h - u), 0.0)
    value = 0.5 * np.where(u < 0, tail, u + h)
    return value if value.ndim else float(value)


def smoothed_hinge_d1(u: ArrayLike, eps: float) -> ArrayLike:
    u = np.asarray(u, dtype=np.float64)
    h = np.hypot(eps, u)
    # 1 + u/h, written without cancellation for u < 0
    with np.errstate(divide="ignore", invalid="ignore"):
        low = eps * eps / ((h - u) * h)
    value = 0.5 * np.where(u < 0, low, 1.0 + u / h)
    return value if value.ndim else float(value)


def smoothed_hinge_d2(u: ArrayLike, eps: float) -> ArrayLike:
    u = np.asarray(u, dtype=np.float64)
    h = np.hypot(eps, u)
    value = 0.5 * eps * eps / (h * h * h)
    return value if value.ndim else float(value)


def check_weights(data: Dataset, w: np.ndarray) -> np.ndarray:
    w = np.asarray(w, dtype=np.float64)
    if w.shape != (data.m,):
        raise DimensionMismatchError(
            f"weight vector has shape {w.shape}, dataset has {data.m} features",
            expected=data.m,
        )
    return w


def margins(data: Dataset, w: np.ndarray) -> np.ndarray:
    """u = 1 - y * (X w), one entry per sample."""
    w = check_weights(data, w)
    return 1.0 - data.y * (data.X @ w)


def objective_smooth(
    data: Dataset,
    w: np.ndarray,
    lam: float,
    eps: float,
    report: Optional[SolveReport] = None,
) -> float:
    u = margins(data, w)
    count_data_pass(report, EvalKind.OBJECTIVE)
    return float(0.5 * lam * np.dot(w, w) + np.mean(smoothed_hinge(u, eps)))


def objective_penalized(
    data: Dataset,
    w: np.ndarray,
    params: HyperParams,
    eps: float,
    report: Optional[SolveReport] = None,
) -> float:
    """Smoothed objective plus mu * ||w||_1."""
    smooth = objective_smooth(data, w, params.lam, eps, report)
    if params.mu == 0.0:
        return smooth
    return smooth + params.mu * float(np.sum(np.abs(w)))


def objective_hinge(
    data: Dataset,
    w: np.ndarray,
    lam: float,
    report: Optional[SolveReport] = None,
) -> float:
    """Exact hinge objective 1/2 lam ||w||^2 + mean(max(0, u))."""
    u = margins(data, w)
    count_data_pass(report, EvalKind.OBJECTIVE)
    return float(0.5 * lam * np.dot(w, w) + np.mean(np.maximum(u, 0.0)))


def gradient_smooth(
    data: Dataset,
    w: np.ndarray,
    lam: float,
    eps: float,
    report: Optional[SolveReport] = None,
) -> np.ndarray:
    u = margins(data, w)
    count_data_pass(report, EvalKind.GRADIENT)
    coef = smoothed_hinge_d1(u, eps) * data.y
    return lam * np.asarray(w, dtype=np.float64) - (data.X.T @ coef) / data.n


def hessian_active(
    data: Dataset,
    w: np.ndarray,
    lam: float,
    eps: float,
    active: np.ndarray,
    report: Optional[SolveReport] = None,
) -> np.ndarray:
    """
    lam I + (1/n) X_A^T diag(psi''(u)) X_A restricted to the columns in
    `active` (an index array or boolean mask). Never forms the m x m matrix.
    """
    active = np.asarray(active)
    if active.dtype == bool:
        active = np.flatnonzero(active)
    if active.size and (active.min() < 0 or active.max() >= data.m):
        raise DimensionMismatchError(f"active indices must lie in [0, {data.m})")
    u = margins(data, w)
    count_data_pass(report, EvalKind.HESSIAN)
    k = active.size
    if k == 0:
        return np.zeros((0, 0))

    XA = data.X[:, active]
    weights = smoothed_hinge_d2(u, eps) / data.n
    H = (XA.T @ (sp.diags(weights) @ XA)).toarray()
    # symmetrize the sparse product to machine precision
    H = 0.5 * (H + H.T)
    H[np.diag_indices(k)] += lam
    return H


def hessian_factor_active(
    data: Dataset,
    w: np.ndarray,
    eps: float,
    active: np.ndarray,
    report: Optional[SolveReport] = None,
) -> sp.csr_matrix:
    """
    B = diag(sqrt(psi''(u) / n)) X_A, so that the active Hessian block is
    lam I + B^T B. Used when the block is wider than the number of samples.
    """
    active = np.asarray(active)
    if active.dtype == bool:
        active = np.flatnonzero(active)
    u = margins(data, w)
    count_data_pass(report, EvalKind.HESSIAN)
    scale = np.sqrt(smoothed_hinge_d2(u, eps) / data.n)
    return sp.csr_matrix(sp.diags(scale) @ data.X[:, active])


def predict(data: Dataset, w: np.ndarray) -> np.ndarray:
    """sign(X w) with ties mapped to +1."""
    w = check_weights(data, w)
    return np.where(data.X @ w >= 0.0, 1.0, -1.0)


def accuracy(data: Dataset, w: np.ndarray) -> float:
    """Percentage of samples classified correctly."""
    return float(100.0 * np.mean(predict(data, w) == data.y))
