import logging
from dataclasses import replace
from typing import Tuple

import numpy as np
import scipy.sparse as sp

from smsvm.core.errors import DatasetError
from smsvm.core.types import Dataset

logger = logging.getLogger(__name__)


def train_test_split(data: Dataset, test_fraction: float, seed: int = 0) -> Tuple[Dataset, Dataset]:
    """
    Stratified split. Each class sends round(count * test_fraction) samples
    to the test side, clamped so both sides keep at least one.
    """
    if not 0.0 < test_fraction < 1.0:
        raise DatasetError(f"test_fraction must lie in (0, 1), got {test_fraction}")
    rng = np.random.default_rng(seed)
    train_rows, test_rows = [], []
    for label in (-1.0, 1.0):
        rows = np.flatnonzero(data.y == label)
        if rows.size < 2:
            raise DatasetError(f"class {label:+g} has {rows.size} samples; stratified split needs 2")
        rows = rng.permutation(rows)
        k = int(np.floor(rows.size * test_fraction + 0.5))
        k = min(max(k, 1), rows.size - 1)
        test_rows.append(rows[:k])
        train_rows.append(rows[k:])

    train = data.subset(np.sort(np.concatenate(train_rows)))
    test = data.subset(np.sort(np.concatenate(test_rows)))
    return train, test


def add_bias_feature(data: Dataset) -> Dataset:
    """Append a constant 1 column."""
    ones = sp.csr_matrix(np.ones((data.n, 1)))
    X = sp.hstack([data.X, ones], format="csr")
    X.sort_indices()
    return replace(data, X=X)


def subsample(data: Dataset, n_rows: int, seed: int = 0) -> Dataset:
    if n_rows >= data.n:
        return data
    rng = np.random.default_rng(seed)
    rows = np.sort(rng.choice(data.n, size=n_rows, replace=False))
    logger.info(f"Subsampled {data.name or 'dataset'} to {n_rows} of {data.n} rows")
    return data.subset(rows)
