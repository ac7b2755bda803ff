from dataclasses import dataclass, field, replace
from typing import Dict, FrozenSet, Optional, Sequence

import numpy as np
import scipy.sparse as sp

from smsvm.core.errors import DatasetError


@dataclass(frozen=True)
class Dataset:
    """
    n labeled samples with sparse feature rows.

    X is an n x m CSR matrix in canonical form (sorted, unique column
    indices per row); y holds labels in {-1, +1} as float64.
    """
    X: sp.csr_matrix
    y: np.ndarray
    label_map: Optional[Dict[str, int]] = None
    name: str = ""

    def __post_init__(self):
        X = self.X
        if not (sp.issparse(X) and X.format == "csr"):
            X = sp.csr_matrix(X, dtype=np.float64)
            object.__setattr__(self, "X", X)
        if X.dtype != np.float64:
            object.__setattr__(self, "X", X.astype(np.float64))
        y = np.asarray(self.y, dtype=np.float64).ravel()
        object.__setattr__(self, "y", y)

        n, m = self.X.shape
        if n < 1 or m < 1:
            raise DatasetError(f"Dataset needs n >= 1 and m >= 1, got shape {self.X.shape}")
        if y.shape[0] != n:
            raise DatasetError(f"{y.shape[0]} labels for {n} rows")
        if not np.all((y == 1.0) | (y == -1.0)):
            bad = np.unique(y[(y != 1.0) & (y != -1.0)])
            raise DatasetError(f"labels must be -1 or +1, found {bad[:5].tolist()}")
        if not self.X.has_canonical_format:
            raise DatasetError("feature indices must be unique and sorted within each row")

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def m(self) -> int:
        return self.X.shape[1]

    @classmethod
    def from_dense(cls, X, y, **kwargs) -> "Dataset":
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        return cls(sp.csr_matrix(X), np.asarray(y, dtype=np.float64), **kwargs)

    def subset(self, rows: Sequence[int]) -> "Dataset":
        rows = np.asarray(rows, dtype=np.intp)
        return replace(self, X=self.X[rows], y=self.y[rows])

    def class_counts(self) -> Dict[int, int]:
        return {-1: int(np.sum(self.y < 0)), 1: int(np.sum(self.y > 0))}


@dataclass
class SolverState:
    """
    Iterate of the active-set Newton method.

    inactive is the exact-zero set I of w as a boolean mask; candidates is
    the activation set J (a subset of I). Newton systems are solved on the
    active set (~inactive) | candidates. blocked marks coordinates that a
    failed line search removed from J; they are not reactivated until eps
    is next reduced.
    """
    w: np.ndarray
    inactive: np.ndarray
    candidates: np.ndarray
    eps: float
    blocked: np.ndarray = None
    phase: int = 0
    grad: Optional[np.ndarray] = field(default=None, repr=False)
    objective: Optional[float] = None

    def __post_init__(self):
        if self.blocked is None:
            self.blocked = np.zeros_like(self.inactive, dtype=bool)

    @classmethod
    def start(cls, w: np.ndarray, eps: float) -> "SolverState":
        w = np.array(w, dtype=np.float64)
        inactive = w == 0.0
        return cls(w=w, inactive=inactive, candidates=np.zeros_like(inactive), eps=eps)

    @property
    def active(self) -> np.ndarray:
        return ~self.inactive | self.candidates

    @property
    def frozen(self) -> np.ndarray:
        """I \\ J: coordinates held at exactly zero by the next Newton step."""
        return self.inactive & ~self.candidates

    @property
    def inactive_set(self) -> FrozenSet[int]:
        return frozenset(np.flatnonzero(self.inactive).tolist())

    @property
    def candidate_set(self) -> FrozenSet[int]:
        return frozenset(np.flatnonzero(self.candidates).tolist())
