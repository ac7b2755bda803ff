from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from smsvm.core.params import SyntheticSpec

MethodName = Literal["smsvm-l1l2", "smsvm-l2", "smsvm", "subgrad", "sgd", "cg", "cg-l2"]
METHOD_NAMES = ["smsvm-l1l2", "smsvm-l2", "smsvm", "subgrad", "sgd", "cg", "cg-l2"]


class DatasetSpec(BaseModel):
    """One dataset entry of a bench config: a libSVM file or a synthetic recipe."""

    name: str
    kind: Literal["libsvm", "synthetic"] = "libsvm"
    path: Optional[str] = None
    test_fraction: float = Field(0.2, gt=0, lt=1)
    positive_label: Optional[float] = None
    subsample: Optional[int] = Field(None, ge=4)
    bias: bool = False
    # synthetic only
    n: int = Field(100, ge=2)
    m: int = Field(10, ge=1)
    centroid_scale: float = Field(1.0, ge=0)
    sparsity: float = Field(0.0, ge=0, lt=1)

    @model_validator(mode="after")
    def _check_source(self) -> "DatasetSpec":
        if self.kind == "libsvm" and not self.path:
            raise ValueError(f"dataset {self.name!r}: libsvm datasets need a path")
        return self

    def synthetic_spec(self, seed: int) -> SyntheticSpec:
        return SyntheticSpec(
            n=self.n,
            m=self.m,
            centroid_scale=self.centroid_scale,
            sparsity=self.sparsity,
            seed=seed,
            name=self.name,
        )


class MethodSpec(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    method: MethodName
    label: Optional[str] = None
    lam: float = Field(1e-2, ge=0, alias="lambda")
    mu: float = Field(0.0, ge=0)
    overrides: Dict[str, Any] = Field(default_factory=dict, description="extra HyperParams/BaselineConfig fields")

    @property
    def display_name(self) -> str:
        return self.label or self.method


class BenchConfig(BaseModel):
    description: Optional[str] = None
    datasets: List[DatasetSpec] = Field(..., min_length=1)
    methods: List[MethodSpec] = Field(..., min_length=1)
    repetitions: int = Field(1, ge=1)
    seed: int = 0
    record_timing: bool = True
    workers: Optional[int] = Field(None, ge=1)
