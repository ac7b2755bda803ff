"""
Two-centroid Gaussian data: x ~ N(c_class, I_m) around scaled centroids,
with an optional fraction of each centroid's components set to zero.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from smsvm.core.params import SyntheticSpec
from smsvm.core.types import Dataset

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SyntheticDataset:
    data: Dataset
    # rows: positive centroid, negative centroid
    centroids: np.ndarray


def generate_synthetic(spec: SyntheticSpec) -> SyntheticDataset:
    rng = np.random.default_rng(spec.seed)
    n, m = spec.n, spec.m
    centroids = rng.standard_normal((2, m)) * spec.centroid_scale
    k = math.floor(spec.sparsity * m)
    if k:
        for c in centroids:
            c[rng.choice(m, size=k, replace=False)] = 0.0

    n_pos = n - n // 2
    X = rng.standard_normal((n, m))
    X[:n_pos] += centroids[0]
    X[n_pos:] += centroids[1]
    y = np.concatenate([np.ones(n_pos), -np.ones(n // 2)])
    order = rng.permutation(n)

    name = spec.name or f"synthetic-{n}x{m}"
    logger.debug(f"Generated {name} (scale={spec.centroid_scale}, sparsity={spec.sparsity}, seed={spec.seed})")
    data = Dataset.from_dense(X[order], y[order], name=name)
    return SyntheticDataset(data=data, centroids=centroids)
