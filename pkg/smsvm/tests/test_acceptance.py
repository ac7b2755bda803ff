"""
End-to-end accuracy, sparsity and efficiency checks on desk-scale data.
Deselected by default; run with `pytest -m slow`. Real datasets are read from SMSVM_DATA_DIR and
skipped when absent.
"""
import os

import numpy as np
import pytest

from smsvm.core.params import BaselineConfig, HyperParams, SyntheticSpec
from smsvm.data.libsvm import load_libsvm
from smsvm.data.split import add_bias_feature, subsample, train_test_split
from smsvm.data.synthetic import generate_synthetic
from smsvm.optim.baselines import sgd
from smsvm.optim.loss import accuracy
from smsvm.optim.solver import svm_smooth
from smsvm.tests.conftest import (
    AUSTRALIAN_FILE,
    COVTYPE_FILE,
    TALL_SPEC,
    WIDE_SPEC,
    assert_phase_descent,
    data_file,
)

pytestmark = pytest.mark.slow

RUNS = 10
WIDE_L1L2 = HyperParams(lam=1.0, mu=0.2)
WIDE_L2 = HyperParams(lam=1.0, mu=0.0)
TALL_L1L2 = HyperParams(lam=1e-2, mu=1e-2)
TALL_L2 = HyperParams(lam=1e-2, mu=0.0)


def _split(spec: dict, seed: int):
    data = generate_synthetic(SyntheticSpec(**spec, seed=seed)).data
    return train_test_split(data, 0.2, seed=seed)


@pytest.fixture(scope="module")
def wide_runs():
    runs = []
    for seed in range(RUNS):
        train, test = _split(WIDE_SPEC, seed)
        w1, r1 = svm_smooth(train, WIDE_L1L2)
        w2, r2 = svm_smooth(train, WIDE_L2)
        runs.append({
            "l1l2": (accuracy(test, w1), np.count_nonzero(w1), r1),
            "l2": (accuracy(test, w2), np.count_nonzero(w2), r2),
        })
    return runs


@pytest.fixture(scope="module")
def tall_split():
    return _split(TALL_SPEC, 0)


class TestWideSynthetic:
    def test_accuracy_bands(self, wide_runs):
        assert np.mean([run["l1l2"][0] for run in wide_runs]) >= 88.0
        assert np.mean([run["l2"][0] for run in wide_runs]) >= 95.0

    def test_l1_term_gives_sparser_weights(self, wide_runs):
        sparser = sum(run["l1l2"][1] < run["l2"][1] for run in wide_runs)
        assert sparser >= 9
        assert all(run["l1l2"][1] < WIDE_SPEC["m"] for run in wide_runs)

    def test_certificates_and_invariants(self, wide_runs):
        for run in wide_runs:
            for _, _, report in run.values():
                assert report.final_kkt <= 1e-4
                assert_phase_descent(report)


class TestTallSynthetic:
    def test_l2_accuracy_band(self, tall_split):
        train, test = tall_split
        w, report = svm_smooth(train, TALL_L2)
        assert accuracy(test, w) >= 80.0
        assert_phase_descent(report)

    def test_modest_number_of_passes(self, tall_split):
        train, test = tall_split
        w, report = svm_smooth(train, TALL_L1L2)
        acc = accuracy(test, w)
        assert acc >= 80.0
        assert report.grad_evals + report.hess_evals <= 200
        assert_phase_descent(report)

        epochs = 10
        config = BaselineConfig(method="sgd", lam=TALL_L1L2.lam, batch_size=32, max_iters=epochs * -(-train.n // 32))
        w_sgd, sgd_report = sgd(train, config)
        assert accuracy(test, w_sgd) >= 80.0
        assert report.grad_evals < sgd_report.grad_evals


@pytest.mark.skipif(not os.path.exists(data_file(AUSTRALIAN_FILE)), reason="australian.svm not in data dir")
def test_australian_accuracy_band():
    data = add_bias_feature(load_libsvm(data_file(AUSTRALIAN_FILE)))
    params = HyperParams(lam=1e-2, mu=1e-3)
    accs = []
    for seed in range(RUNS):
        train, test = train_test_split(data, 0.2, seed=seed)
        w, report = svm_smooth(train, params)
        assert_phase_descent(report)
        accs.append(accuracy(test, w))
    assert np.mean(accs) >= 83.0


@pytest.mark.skipif(not os.path.exists(data_file(COVTYPE_FILE)), reason="CoverType not in data dir")
def test_covertype_subsample_smoke():
    data = subsample(load_libsvm(data_file(COVTYPE_FILE)), 10_000, seed=0)
    train, test = train_test_split(data, 0.2, seed=0)
    w, report = svm_smooth(train, HyperParams(lam=1e-2, mu=1e-3))
    assert np.all(np.isfinite(w))
    assert 0.0 <= accuracy(test, w) <= 100.0
    assert report.final_nnz <= train.m
