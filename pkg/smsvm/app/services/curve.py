"""
Mean hinge loss of a one-feature problem along a grid of weights: for
y = +1 the feature is uniform on [0, 1], for y = -1 uniform on [-1, 0].
"""
import logging
from typing import Iterable

import numpy as np
import pandas as pd

from smsvm.core.types import Dataset
from smsvm.optim.loss import smoothed_hinge

logger = logging.getLogger(__name__)


def curve_dataset(n: int = 200, seed: int = 0) -> Dataset:
    rng = np.random.default_rng(seed)
    n_pos = n - n // 2
    x = np.concatenate([rng.uniform(0.0, 1.0, n_pos), rng.uniform(-1.0, 0.0, n // 2)])
    y = np.concatenate([np.ones(n_pos), -np.ones(n // 2)])
    return Dataset.from_dense(x[:, None], y, name="curve-1d")


def smooth_curve(
    n: int = 200,
    seed: int = 0,
    w_min: float = -1.0,
    w_max: float = 5.0,
    points: int = 601,
    eps_values: Iterable[float] = (),
) -> pd.DataFrame:
    """Columns: w, mean_hinge and one smoothed_eps_<eps> column per eps."""
    data = curve_dataset(n, seed)
    yx = data.y * data.X.toarray()[:, 0]
    grid = np.linspace(w_min, w_max, points)
    u = 1.0 - np.outer(grid, yx)

    df = pd.DataFrame({"w": grid, "mean_hinge": np.maximum(u, 0.0).mean(axis=1)})
    for eps in eps_values:
        df[f"smoothed_eps_{eps:g}"] = smoothed_hinge(u, eps).mean(axis=1)
    logger.info(f"Evaluated {points} grid points on n={n} samples")
    return df
