"""
Shared test fixtures and configuration for the smsvm test suite.
"""
import os
import sys

# Keep solver chatter out of test output unless asked for.
os.environ.setdefault("SMSVM_LOG_LEVEL", "WARNING")

# Add the repository root to sys.path so the smsvm package resolves.
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", ".."))

import numpy as np
import pytest

from smsvm.core.config import settings
from smsvm.core.params import SyntheticSpec
from smsvm.core.types import Dataset
from smsvm.data.synthetic import generate_synthetic

# ---------------------------------------------------------------------------
# Shared data constants
# ---------------------------------------------------------------------------

TINY_LIBSVM = (
    "+1 1:0.5 3:2\n"
    "-1 2:1.5\n"
    "+1 1:1 2:-0.25 3:0.75\n"
    "-1 3:-1\n"
)

# Two samples with y x = 1: f(w) = 1/2 lam w^2 + psi_eps(1 - w)
ONE_D_X = [[1.0], [-1.0]]
ONE_D_Y = [1.0, -1.0]

WIDE_SPEC = dict(n=50, m=2500, centroid_scale=0.3)
TALL_SPEC = dict(n=10_000, m=50, centroid_scale=0.5)

AUSTRALIAN_FILE = "australian.svm"
COVTYPE_FILE = "covtype.libsvm.binary"


def data_file(name: str) -> str:
    return os.path.join(settings.data_dir, name)


def random_problem(seed: int, n: int = 60, m: int = 8, noise: float = 0.5) -> Dataset:
    """Dense Gaussian features with labels from a random hyperplane plus noise."""
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, m))
    y = np.sign(X @ rng.standard_normal(m) + noise * rng.standard_normal(n))
    y[y == 0] = 1.0
    return Dataset.from_dense(X, y)


def assert_phase_descent(report) -> None:
    """Objective non-increasing within each (eps, I) phase; at most one new zero per step."""
    trace = np.array(report.objective_trace)
    phases = np.array(report.phase_trace)
    assert trace.size == phases.size == len(report.inactive_added)
    for phase in np.unique(phases):
        assert np.all(np.diff(trace[phases == phase]) <= 0.0)
    assert max(report.inactive_added, default=0) <= 1


# ---------------------------------------------------------------------------
# Fixtures
# ---------------------------------------------------------------------------

@pytest.fixture(autouse=True)
def clear_dataset_cache():
    """Clear the bench's module-level dataset cache around each test."""
    from smsvm.app.services.bench import clear_cache
    clear_cache()
    yield
    clear_cache()


@pytest.fixture
def one_d_data() -> Dataset:
    return Dataset.from_dense(ONE_D_X, ONE_D_Y)


@pytest.fixture
def tiny_libsvm_path(tmp_path):
    path = tmp_path / "tiny.svm"
    path.write_text(TINY_LIBSVM)
    return path


@pytest.fixture
def small_synthetic() -> Dataset:
    return generate_synthetic(SyntheticSpec(n=80, m=6, centroid_scale=1.5, seed=3)).data
