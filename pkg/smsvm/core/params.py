from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class HyperParams(BaseModel):
    """Penalties and continuation schedule for the smoothed-hinge Newton solver."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    lam: float = Field(1e-2, ge=0, alias="lambda", description="l2 weight")
    mu: float = Field(0.0, ge=0, description="l1 weight")
    eps0: float = Field(1.0, gt=0, description="initial smoothing parameter")
    eps_min: float = Field(1e-3, gt=0, description="terminal smoothing parameter")
    beta: float = Field(2.0, gt=1, description="smoothing reduction factor")
    c1: float = Field(1e-4, gt=0, lt=1, description="Armijo constant")
    newton_tol_factor: float = Field(10.0, gt=0)
    max_outer_iters: int = Field(500, ge=1)
    armijo_max_halvings: int = Field(40, ge=1)
    kkt_tol: float = Field(1e-4, gt=0)
    polish_max_iters: int = Field(50, ge=0)
    seed: int = 0

    @model_validator(mode="after")
    def _check_schedule(self) -> "HyperParams":
        if self.eps0 < self.eps_min:
            raise ValueError(f"eps0 ({self.eps0}) must be >= eps_min ({self.eps_min})")
        return self


StepSchedule = Literal["decay", "inverse_lambda", "constant"]
BaselineMethod = Literal["subgrad", "sgd", "cg", "cg_l2"]


class BaselineConfig(BaseModel):
    """Settings shared by the subgradient, SGD and conjugate-gradient baselines."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    method: BaselineMethod = "subgrad"
    lam: float = Field(1e-2, ge=0, alias="lambda")
    step_size: float = Field(0.1, gt=0, description="eta_0 of the step schedule")
    step_schedule: StepSchedule = "decay"
    step_decay: float = Field(100.0, gt=0, description="T_0 of eta_t = eta_0 / (1 + t / T_0)")
    batch_size: int = Field(32, ge=1)
    max_iters: int = Field(1000, ge=1)
    c1: float = Field(1e-4, gt=0, lt=1)
    max_halvings: int = Field(40, ge=1)
    gtol: float = Field(1e-10, ge=0)
    keep_best: bool = False
    seed: int = 0


class SyntheticSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int = Field(100, ge=2)
    m: int = Field(10, ge=1)
    centroid_scale: float = Field(1.0, ge=0)
    sparsity: float = Field(0.0, ge=0, lt=1)
    seed: int = 0
    name: Optional[str] = None
