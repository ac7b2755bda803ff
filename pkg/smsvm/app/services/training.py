import logging
from dataclasses import replace
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np
import scipy.sparse as sp

from smsvm.app.models.response import ModelFile
from smsvm.core.errors import DimensionMismatchError
from smsvm.core.params import BaselineConfig, HyperParams
from smsvm.core.report import SolveReport
from smsvm.core.types import Dataset
from smsvm.optim.baselines import run_baseline
from smsvm.optim.solver import svm_smooth

logger = logging.getLogger(__name__)

SMSVM_METHODS = ("smsvm-l1l2", "smsvm-l2", "smsvm")
# CLI spelling -> BaselineConfig.method
BASELINE_METHODS = {
    "subgrad": "subgrad",
    "sgd": "sgd",
    "cg": "cg",
    "cg-l2": "cg_l2",
}

Params = Union[HyperParams, BaselineConfig]


def build_params(
    method: str,
    lam: float = 1e-2,
    mu: float = 0.0,
    overrides: Optional[Dict[str, Any]] = None,
    seed: int = 0,
) -> Params:
    """
    Resolve a method name and penalties into solver settings.

    smsvm-l2 drops mu; plain smsvm drops both penalties. Baselines ignore mu.
    """
    penalties = {
        "smsvm-l1l2": {"lam": lam, "mu": mu},
        "smsvm-l2": {"lam": lam, "mu": 0.0},
        "smsvm": {"lam": 0.0, "mu": 0.0},
    }
    if method in penalties:
        return HyperParams(**{**penalties[method], "seed": seed, **(overrides or {})})
    if method in BASELINE_METHODS:
        if mu:
            logger.warning(f"{method} has no l1 term; ignoring mu={mu}")
        fields = {"method": BASELINE_METHODS[method], "lam": lam, "seed": seed, **(overrides or {})}
        return BaselineConfig(**fields)
    raise ValueError(f"unknown method {method!r}")


def fit(
    data: Dataset,
    method: str,
    lam: float = 1e-2,
    mu: float = 0.0,
    overrides: Optional[Dict[str, Any]] = None,
    seed: int = 0,
) -> Tuple[np.ndarray, SolveReport, Params]:
    params = build_params(method, lam, mu, overrides, seed)
    report = SolveReport(method=method)
    logger.info(f"Training {method} on {data.name or 'dataset'} (n={data.n}, m={data.m})")
    if isinstance(params, HyperParams):
        w, report = svm_smooth(data, params, report=report)
    else:
        w, report = run_baseline(data, params, report=report)
    return w, report, params


def to_model_file(
    method: str,
    w: np.ndarray,
    params: Params,
    data: Dataset,
    bias: bool = False,
    positive_label: Optional[float] = None,
) -> ModelFile:
    return ModelFile(
        method=method,
        weights=[float(v) for v in w],
        n_features=int(w.shape[0]) - int(bias),
        bias=bias,
        hyperparams=params.model_dump(),
        label_map=data.label_map,
        positive_label=positive_label,
    )


def align_features(data: Dataset, n_features: int, allow_mismatch: bool = False) -> Dataset:
    """
    Make data.m equal n_features: narrower data is padded with zero
    columns; wider data is an error unless allow_mismatch truncates it.
    """
    if data.m == n_features:
        return data
    if data.m < n_features:
        pad = sp.csr_matrix((data.n, n_features - data.m))
        return replace(data, X=sp.hstack([data.X, pad], format="csr"))
    if not allow_mismatch:
        raise DimensionMismatchError(
            f"data has {data.m} features but the model was trained on {n_features}",
            data_features=data.m,
            model_features=n_features,
        )
    logger.warning(f"Dropping features beyond index {n_features} ({data.m - n_features} columns)")
    X = data.X[:, :n_features]
    X.sort_indices()
    return replace(data, X=sp.csr_matrix(X))
