from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, Field


class EvalKind(str, Enum):
    OBJECTIVE = "objective"
    GRADIENT = "gradient"
    HESSIAN = "hessian"


class SolveReport(BaseModel):
    """Counters, traces and the final certificate of one solve."""

    method: str = ""
    objective_trace: List[float] = Field(default_factory=list)
    phase_trace: List[int] = Field(default_factory=list)
    inactive_added: List[int] = Field(default_factory=list)
    grad_evals: int = 0
    hess_evals: int = 0
    obj_evals: int = 0
    data_passes: float = 0
    iterations: int = 0
    wall_time: float = 0.0
    final_kkt: Optional[float] = None
    final_nnz: Optional[int] = None
    final_eps: Optional[float] = None


_COUNTER_FIELDS = {
    EvalKind.OBJECTIVE: "obj_evals",
    EvalKind.GRADIENT: "grad_evals",
    EvalKind.HESSIAN: "hess_evals",
}


def count_data_pass(report: Optional[SolveReport], kind: EvalKind, data_pass: bool = True) -> Optional[SolveReport]:
    """
    Record one evaluation of `kind`. Mini-batch evaluations pass
    data_pass=False and account for full passes separately.
    """
    if report is None:
        return None
    field = _COUNTER_FIELDS[EvalKind(kind)]
    setattr(report, field, getattr(report, field) + 1)
    if data_pass:
        report.data_passes += 1
    return report
