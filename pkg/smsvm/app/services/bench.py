"""
Benchmark runner: every (dataset, method, repetition) of a BenchConfig is
trained on a stratified split and scored on the held-out part.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from threading import Lock
from typing import List, Optional, Tuple

import pandas as pd
from cachetools import LRUCache
from pydantic import ValidationError

from smsvm.app.models.request import BenchConfig, DatasetSpec, MethodSpec
from smsvm.app.models.response import CSV_COLUMNS, BenchResult, BenchRow
from smsvm.app.services.training import fit
from smsvm.core.config import settings
from smsvm.core.errors import SmsvmError
from smsvm.core.types import Dataset
from smsvm.data.libsvm import load_libsvm
from smsvm.data.split import add_bias_feature, subsample, train_test_split
from smsvm.data.synthetic import generate_synthetic
from smsvm.optim.loss import accuracy

logger = logging.getLogger(__name__)

# Parsed files and per-repetition splits, shared by worker threads.
# LRUCache is not thread-safe on its own; Lock guards all reads and writes.
_dataset_cache: LRUCache = LRUCache(maxsize=32)
_cache_lock = Lock()

COUNTER_COLUMNS = ["acc", "time_s", "grad_evals", "hess_evals", "obj_evals", "data_passes", "nnz"]


def resolve_data_path(path: str) -> Path:
    """Relative paths that do not exist are looked up under settings.data_dir."""
    candidate = Path(path)
    if candidate.is_absolute() or candidate.exists():
        return candidate
    return Path(settings.data_dir) / candidate


def _cached(key, build):
    with _cache_lock:
        value = _dataset_cache.get(key)
    if value is None:
        value = build()
        with _cache_lock:
            _dataset_cache[key] = value
    return value


def clear_cache() -> None:
    with _cache_lock:
        _dataset_cache.clear()


def load_dataset(spec: DatasetSpec, seed: int) -> Dataset:
    """Full dataset for one repetition; synthetic data is drawn afresh from `seed`."""
    if spec.kind == "synthetic":
        data = generate_synthetic(spec.synthetic_spec(seed)).data
    else:
        path = resolve_data_path(spec.path)
        data = _cached(("file", str(path), spec.positive_label), lambda: load_libsvm(path, positive_label=spec.positive_label))
        if spec.subsample:
            data = subsample(data, spec.subsample, seed)
    if spec.bias:
        data = add_bias_feature(data)
    return data


def prepare_split(spec: DatasetSpec, rep: int, base_seed: int) -> Tuple[Dataset, Dataset]:
    seed = base_seed + rep

    def build():
        return train_test_split(load_dataset(spec, seed), spec.test_fraction, seed)

    return _cached(("split", spec.model_dump_json(), rep, base_seed), build)


def run_single(
    config: BenchConfig,
    dataset_index: int,
    method: MethodSpec,
    rep: int,
) -> BenchRow:
    spec = config.datasets[dataset_index]
    row = {"method": method.display_name, "dataset": spec.name, "rep": rep}
    try:
        train, test = prepare_split(spec, rep, config.seed)
        w, report, _ = fit(train, method.method, method.lam, method.mu, method.overrides, seed=config.seed + rep)
        acc = accuracy(test, w)
    except (SmsvmError, ValidationError, ValueError, OSError) as e:
        logger.error(f"{method.display_name} on {spec.name} rep {rep} failed: {e}")
        return BenchRow(**row, status=f"error: {type(e).__name__}: {e}")

    logger.info(f"{method.display_name} on {spec.name} rep {rep}: acc={acc:.1f}, nnz={report.final_nnz}")
    return BenchRow(
        **row,
        acc=acc,
        time_s=report.wall_time if config.record_timing else 0.0,
        grad_evals=report.grad_evals,
        hess_evals=report.hess_evals,
        obj_evals=report.obj_evals,
        data_passes=report.data_passes,
        nnz=report.final_nnz or 0,
    )


def run_bench(config: BenchConfig, workers: Optional[int] = None) -> List[BenchRow]:
    """Rows in config order: dataset, then method, then repetition."""
    tasks = [
        (d, method, rep)
        for d in range(len(config.datasets))
        for method in config.methods
        for rep in range(config.repetitions)
    ]
    workers = workers or config.workers or settings.bench_workers
    logger.info(f"Running {len(tasks)} bench runs on {workers} worker(s)")
    if workers == 1:
        return [run_single(config, d, method, rep) for d, method, rep in tasks]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(lambda task: run_single(config, *task), tasks))


def aggregate(rows: List[BenchRow]) -> List[BenchRow]:
    """One mean row per (method, dataset) over its successful repetitions."""
    if not rows:
        return []
    df = pd.DataFrame([r.model_dump() for r in rows])
    out = []
    for (method, dataset), group in df.groupby(["method", "dataset"], sort=False):
        ok = group[group["status"] == "ok"]
        failed = len(group) - len(ok)
        status = "ok" if failed == 0 else f"{failed}/{len(group)} failed"
        means = ok[COUNTER_COLUMNS].mean() if len(ok) else pd.Series(math.nan, index=COUNTER_COLUMNS)
        out.append(BenchRow(method=method, dataset=dataset, rep="mean", status=status, **means.to_dict()))
    return out


def results_frame(rows: List[BenchRow], aggregate_rows: List[BenchRow]) -> pd.DataFrame:
    df = pd.DataFrame([r.model_dump() for r in rows + aggregate_rows], columns=CSV_COLUMNS)
    df["acc"] = df["acc"].map(lambda v: "" if pd.isna(v) else f"{v:.1f}")
    return df


def write_results(config: BenchConfig, rows: List[BenchRow], out_dir: Path, stem: str = "bench") -> Tuple[Path, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    aggregate_rows = aggregate(rows)
    csv_path = out_dir / f"{stem}.csv"
    json_path = out_dir / f"{stem}.json"
    results_frame(rows, aggregate_rows).to_csv(csv_path, index=False, float_format="%.6g")
    result = BenchResult(config=config, rows=rows, aggregate=aggregate_rows)
    json_path.write_text(result.model_dump_json(indent=2))
    logger.info(f"Wrote {csv_path} and {json_path}")
    return csv_path, json_path
