from typing import Any, Dict, List, Optional, Union

import numpy as np
from pydantic import BaseModel, Field

from smsvm.app.models.request import BenchConfig
from smsvm.core.report import SolveReport

SCHEMA_VERSION = 1

CSV_COLUMNS = [
    "method",
    "dataset",
    "rep",
    "acc",
    "time_s",
    "grad_evals",
    "hess_evals",
    "obj_evals",
    "data_passes",
    "nnz",
    "status",
]


class ModelFile(BaseModel):
    """Trained weights plus what is needed to apply them to new files."""

    schema_version: int = SCHEMA_VERSION
    method: str
    weights: List[float]
    n_features: int
    bias: bool = False
    hyperparams: Dict[str, Any] = Field(default_factory=dict)
    label_map: Optional[Dict[str, int]] = None
    positive_label: Optional[float] = None

    @property
    def w(self) -> np.ndarray:
        return np.asarray(self.weights, dtype=np.float64)


class RunReport(BaseModel):
    schema_version: int = SCHEMA_VERSION
    method: str
    dataset: str
    n: int
    m: int
    train_accuracy: float
    objective: float
    report: SolveReport


class BenchRow(BaseModel):
    method: str
    dataset: str
    rep: Union[int, str]
    acc: float = float("nan")
    time_s: float = 0.0
    grad_evals: float = 0
    hess_evals: float = 0
    obj_evals: float = 0
    data_passes: float = 0
    nnz: float = 0
    status: str = "ok"


class BenchResult(BaseModel):
    schema_version: int = SCHEMA_VERSION
    config: BenchConfig
    rows: List[BenchRow]
    aggregate: List[BenchRow]
