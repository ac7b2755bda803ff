import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np
from pydantic import ValidationError

from smsvm.app.models.request import METHOD_NAMES, BenchConfig
from smsvm.app.models.response import SCHEMA_VERSION, ModelFile, RunReport
from smsvm.app.services.bench import resolve_data_path, run_bench, write_results
from smsvm.app.services.curve import smooth_curve
from smsvm.app.services.training import align_features, fit, to_model_file
from smsvm.core.config import settings
from smsvm.core.errors import SmsvmError
from smsvm.core.params import SyntheticSpec
from smsvm.data.libsvm import load_libsvm, save_libsvm
from smsvm.data.split import add_bias_feature
from smsvm.data.synthetic import generate_synthetic
from smsvm.optim.loss import accuracy, objective_hinge, predict

logger = logging.getLogger(__name__)


def non_negative_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number")
    if not value >= 0:
        raise argparse.ArgumentTypeError(f"{text} must be >= 0")
    return value


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
    if value < 1:
        raise argparse.ArgumentTypeError(f"{text} must be >= 1")
    return value


def cmd_train(args: argparse.Namespace) -> int:
    data = load_libsvm(resolve_data_path(args.data), positive_label=args.positive_label)
    if args.bias:
        data = add_bias_feature(data)

    overrides = {}
    if args.method.startswith("smsvm"):
        for field in ("eps0", "eps_min", "beta", "kkt_tol"):
            if getattr(args, field) is not None:
                overrides[field] = getattr(args, field)
    else:
        for field in ("max_iters", "batch_size", "step_size", "step_schedule"):
            if getattr(args, field) is not None:
                overrides[field] = getattr(args, field)

    w, report, params = fit(data, args.method, args.lam, args.mu, overrides, seed=args.seed)

    model = to_model_file(args.method, w, params, data, bias=args.bias, positive_label=args.positive_label)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(model.model_dump_json(indent=2))

    run = RunReport(
        method=args.method,
        dataset=data.name,
        n=data.n,
        m=data.m,
        train_accuracy=accuracy(data, w),
        objective=objective_hinge(data, w, getattr(params, "lam", 0.0)),
        report=report,
    )
    report_path = Path(args.report) if args.report else out.with_suffix(".report.json")
    report_path.write_text(run.model_dump_json(indent=2))

    print(f"train accuracy: {run.train_accuracy:.1f}  nnz: {report.final_nnz}  model: {out}")
    return 0


def cmd_predict(args: argparse.Namespace) -> int:
    model = ModelFile.model_validate_json(Path(args.model).read_text())
    if model.schema_version != SCHEMA_VERSION:
        raise SmsvmError(f"unsupported model schema_version {model.schema_version}")
    data = load_libsvm(
        resolve_data_path(args.data),
        positive_label=model.positive_label,
        label_map=model.label_map,
    )
    data = align_features(data, model.n_features, allow_mismatch=args.allow_dim_mismatch)
    if model.bias:
        data = add_bias_feature(data)

    labels = predict(data, model.w)
    acc = float(100.0 * np.mean(labels == data.y))
    if args.out:
        Path(args.out).write_text("".join("+1\n" if v > 0 else "-1\n" for v in labels))
    print(f"accuracy: {acc:.1f}")
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    config = BenchConfig.model_validate_json(Path(args.config).read_text())
    if args.no_timing:
        config = config.model_copy(update={"record_timing": False})
    rows = run_bench(config, workers=args.workers)
    out_dir = Path(args.out_dir or settings.results_dir)
    csv_path, _ = write_results(config, rows, out_dir, stem=args.name or Path(args.config).stem)
    failed = sum(r.status != "ok" for r in rows)
    print(f"{len(rows)} runs ({failed} failed) -> {csv_path}")
    return 0


def cmd_smooth_curve(args: argparse.Namespace) -> int:
    df = smooth_curve(
        n=args.n,
        seed=args.seed,
        w_min=args.w_min,
        w_max=args.w_max,
        points=args.points,
        eps_values=args.eps or (),
    )
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        df.to_csv(args.out, index=False)
    else:
        df.to_csv(sys.stdout, index=False)
    return 0


def cmd_generate(args: argparse.Namespace) -> int:
    spec = SyntheticSpec(
        n=args.n,
        m=args.m,
        centroid_scale=args.centroid_scale,
        sparsity=args.sparsity,
        seed=args.seed,
    )
    save_libsvm(generate_synthetic(spec).data, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="smsvm",
        description="Smoothed-hinge SVM with l1/l2 penalties, baselines and benchmarks",
    )
    parser.add_argument("--log-level", default=settings.log_level, help="logging level (default from SMSVM_LOG_LEVEL)")
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", help="fit a model on a libSVM file")
    train.add_argument("--data", required=True)
    train.add_argument("--out", required=True, help="model JSON path")
    train.add_argument("--report", help="run report JSON path (default: <out>.report.json)")
    train.add_argument("--method", choices=METHOD_NAMES, default="smsvm-l1l2")
    train.add_argument("--lambda", dest="lam", type=non_negative_float, default=1e-2)
    train.add_argument("--mu", type=non_negative_float, default=0.0)
    train.add_argument("--eps0", type=non_negative_float)
    train.add_argument("--eps-min", dest="eps_min", type=non_negative_float)
    train.add_argument("--beta", type=float)
    train.add_argument("--kkt-tol", dest="kkt_tol", type=non_negative_float)
    train.add_argument("--max-iters", dest="max_iters", type=positive_int)
    train.add_argument("--batch-size", dest="batch_size", type=positive_int)
    train.add_argument("--step-size", dest="step_size", type=non_negative_float)
    train.add_argument("--step-schedule", dest="step_schedule", choices=["decay", "inverse_lambda", "constant"])
    train.add_argument("--positive-label", type=float, help="one-vs-rest: this class is +1")
    train.add_argument("--bias", action="store_true", help="append a constant feature")
    train.add_argument("--seed", type=int, default=0)
    train.set_defaults(handler=cmd_train)

    pred = sub.add_parser("predict", help="apply a model to a libSVM file")
    pred.add_argument("--model", required=True)
    pred.add_argument("--data", required=True)
    pred.add_argument("--out", help="write one predicted label per line")
    pred.add_argument("--allow-dim-mismatch", action="store_true", help="drop features the model never saw")
    pred.set_defaults(handler=cmd_predict)

    bench = sub.add_parser("bench", help="run a benchmark config")
    bench.add_argument("--config", required=True)
    bench.add_argument("--out-dir", help="default: SMSVM_RESULTS_DIR")
    bench.add_argument("--name", help="output file stem (default: config file stem)")
    bench.add_argument("--workers", type=positive_int)
    bench.add_argument("--no-timing", action="store_true", help="write time_s as 0 for reproducible tables")
    bench.set_defaults(handler=cmd_bench)

    curve = sub.add_parser("smooth-curve", help="mean hinge loss of the 1-D problem along a weight grid")
    curve.add_argument("--n", type=positive_int, default=200)
    curve.add_argument("--seed", type=int, default=0)
    curve.add_argument("--w-min", dest="w_min", type=float, default=-1.0)
    curve.add_argument("--w-max", dest="w_max", type=float, default=5.0)
    curve.add_argument("--points", type=positive_int, default=601)
    curve.add_argument("--eps", type=non_negative_float, action="append", help="add a smoothed column (repeatable)")
    curve.add_argument("--out")
    curve.set_defaults(handler=cmd_smooth_curve)

    gen = sub.add_parser("generate", help="write a synthetic two-centroid dataset")
    gen.add_argument("--n", type=positive_int, default=100)
    gen.add_argument("--m", type=positive_int, default=10)
    gen.add_argument("--centroid-scale", dest="centroid_scale", type=non_negative_float, default=1.0)
    gen.add_argument("--sparsity", type=non_negative_float, default=0.0)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)
    gen.set_defaults(handler=cmd_generate)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    # Configure logging
    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    try:
        return args.handler(args)
    except ValidationError as e:
        logger.error(f"Invalid parameters: {e}")
        print(f"error: invalid parameters: {e}", file=sys.stderr)
        return 2
    except (SmsvmError, OSError) as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
