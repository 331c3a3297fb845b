"""Command-line surface: ingest, sweep, train, predict, report.

Contract: exit 0 on success; on failure print exactly one line of the form
`fxbench: error: <message>` to stderr and exit nonzero (1 for runtime
failures, 2 for usage errors). All file outputs are byte-identical across
runs given identical inputs and seeds. FXBENCH_LOG in {error, warn, info,
debug} sets stderr log verbosity (default info).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from .cells import ARCHS, ModelSpec, arch_id, init_model
from .data import (
    DEFAULT_FRACTIONS,
    NormParams,
    SplitDataset,
    build_supervised,
    chrono_split,
    fit_minmax,
    normalize_dataset,
    read_ohlc_csv,
    write_ohlc_csv,
)
from .experiment import (
    TrainConfig,
    TrainingDiverged,
    evaluate,
    run_sweep,
    select_best,
    train,
    trial_seed,
)
from .optim import OPTIMIZERS, default_config
from .serialize import (
    emit_report_csv,
    emit_series_csv,
    load_model,
    parse_report_csv,
    render_report_table,
    save_model,
)

log = logging.getLogger(__name__)

LOG_LEVELS = {
    "error": logging.ERROR,
    "warn": logging.WARNING,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}


class UsageError(Exception):
    """Bad command-line arguments; maps to exit code 2."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def parse_hidden_sizes(text: str) -> tuple[int, ...]:
    """Parse a hidden-size grid: '2..10' (inclusive range), '5', or '2,5,7'."""

    def one(tok: str) -> int:
        try:
            value = int(tok)
        except ValueError:
            raise UsageError(f"bad hidden size {tok!r}") from None
        if value < 1:
            raise UsageError(f"hidden sizes must be >= 1, got {value}")
        return value

    text = text.strip()
    if ".." in text:
        lo_s, _, hi_s = text.partition("..")
        lo, hi = one(lo_s), one(hi_s)
        if hi < lo:
            raise UsageError(f"empty hidden range {text!r}")
        return tuple(range(lo, hi + 1))
    if "," in text:
        return tuple(sorted({one(tok) for tok in text.split(",") if tok.strip()}))
    return (one(text),)


def parse_archs(text: str) -> tuple[str, ...]:
    names = [tok.strip().lower() for tok in text.split(",") if tok.strip()]
    if not names:
        raise UsageError("no architectures given")
    for name in names:
        if name not in ARCHS:
            raise UsageError(f"unknown arch {name!r} (choose from {', '.join(ARCHS)})")
    return tuple(sorted(set(names), key=arch_id))


def _setup_logging() -> None:
    name = os.environ.get("FXBENCH_LOG", "info").strip().lower()
    if name not in LOG_LEVELS:
        raise UsageError(
            f"invalid FXBENCH_LOG {name!r} (choose from {', '.join(LOG_LEVELS)})"
        )
    root = logging.getLogger("fxbench")
    root.setLevel(LOG_LEVELS[name])
    if not root.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("fxbench %(levelname)s: %(message)s"))
        root.addHandler(handler)


def _load_split(path: str, fit_norm: str) -> tuple[SplitDataset, NormParams]:
    """Read a dataset CSV, split chronologically, fit and apply NormParams."""
    records = read_ohlc_csv(path)
    dataset = build_supervised(records)
    split = chrono_split(dataset, DEFAULT_FRACTIONS)
    fit_source = dataset if fit_norm == "all" else split.train
    norm = fit_minmax(fit_source)
    normalized = SplitDataset(
        train=normalize_dataset(split.train, norm),
        validation=normalize_dataset(split.validation, norm),
        test=normalize_dataset(split.test, norm),
        fractions=split.fractions,
    )
    return normalized, norm


def _train_config(args) -> TrainConfig:
    opt = default_config(args.optimizer, args.lr)
    return TrainConfig(optimizer=opt, epochs=args.epochs, batch_size=args.batch, seed=args.seed)


def _print_mae(label: str, mae: float, norm) -> None:
    scale = norm.target_max - norm.target_min
    print(f"{label} mae: denormalized {mae!r} | normalized {mae / scale!r}")


def cmd_ingest(args) -> int:
    records = read_ohlc_csv(args.input, sort=True, validate="error" if args.strict else "warn")
    if not records:
        raise ValueError(f"no data rows in {args.input}")
    write_ohlc_csv(records, args.output)
    print(f"wrote {len(records)} records: {args.output}")
    return 0


def cmd_sweep(args) -> int:
    data, norm = _load_split(args.data, args.fit_norm)
    config = _train_config(args)
    report = run_sweep(
        parse_archs(args.archs),
        parse_hidden_sizes(args.hidden),
        data,
        config,
        pair=args.pair,
        window=args.window,
        measure_time=args.timings,
    )
    report.criterion = "val_mae" if args.select == "val" else "test_mae"
    with open(args.report, "wb") as fh:
        fh.write(emit_report_csv(report))
    best = select_best(report, report.criterion)
    o = best.overall
    value = getattr(o, report.criterion)
    scale = norm.target_max - norm.target_min
    print(f"wrote report: {args.report} ({len(report.trials)} trials)")
    print(
        f"overall best ({report.criterion}): {o.arch.upper()},{o.structure},{value!r}"
        f" | normalized {value / scale!r}"
    )
    return 0


def cmd_train(args) -> int:
    if args.arch not in ARCHS:
        raise UsageError(f"unknown arch {args.arch!r} (choose from {', '.join(ARCHS)})")
    data, norm = _load_split(args.data, args.fit_norm)
    spec = ModelSpec(
        arch=args.arch,
        hidden=args.hidden,
        input_dim=data.train.features.shape[1],
        output_dim=1,
        window=1 if args.arch == "mlp" else args.window,
    )
    model = init_model(spec, trial_seed(args.seed, args.arch, args.hidden))
    config = _train_config(args)
    train(model, data.train, data.validation, config)
    with open(args.model_out, "wb") as fh:
        fh.write(save_model(model, norm))
    print(f"trained {spec.arch.upper()} {spec.structure} for {config.epochs} epochs")
    for label, split in (("train", data.train), ("val", data.validation), ("test", data.test)):
        _print_mae(label, evaluate(model, split, norm).mae, norm)
    print(f"wrote model: {args.model_out}")
    return 0


def cmd_predict(args) -> int:
    with open(args.model, "rb") as fh:
        model, norm = load_model(fh.read())
    if norm is None:
        raise ValueError(
            f"model file {args.model} carries no normalization parameters; "
            "retrain with the train command to embed them"
        )
    records = read_ohlc_csv(args.data)
    dataset = normalize_dataset(build_supervised(records), norm)
    result = evaluate(model, dataset, norm)
    with open(args.series_out, "wb") as fh:
        fh.write(emit_series_csv(result))
    print(f"predictions: {result.n}")
    _print_mae("series", result.mae, norm)
    print(f"wrote series: {args.series_out}")
    return 0


def cmd_report(args) -> int:
    with open(args.infile, "rb") as fh:
        report = parse_report_csv(fh.read())
    report.criterion = "val_mae" if args.select == "val" else "test_mae"
    if args.format == "csv":
        sys.stdout.write(emit_report_csv(report).decode("utf-8"))
    else:
        sys.stdout.write(render_report_table(report))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="fxbench",
        description="OHLC time-series forecasting benchmark: ingest data, "
        "sweep architectures, train, predict, and format reports.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("ingest", help="validate and sort a raw OHLC CSV")
    p.add_argument("--input", required=True, help="raw OHLC CSV path")
    p.add_argument("--output", required=True, help="cleaned dataset CSV path")
    p.add_argument("--strict", action="store_true", help="treat OHLC sanity violations as errors")
    p.set_defaults(func=cmd_ingest)

    def add_training_flags(p, *, with_window=True):
        p.add_argument("--data", required=True, help="dataset CSV (date,open,high,low,close)")
        p.add_argument("--epochs", type=int, default=1500, help="training epochs (default 1500)")
        p.add_argument("--batch", type=int, default=32, help="mini-batch size (default 32)")
        p.add_argument(
            "--optimizer", choices=OPTIMIZERS, default="rmsprop", help="training algorithm"
        )
        p.add_argument(
            "--lr",
            type=float,
            default=None,
            help="learning rate (default 0.001 rmsprop, 0.01 sgd)",
        )
        p.add_argument("--seed", type=int, default=42, help="base seed (default 42)")
        p.add_argument(
            "--fit-norm",
            choices=("train", "all"),
            default="train",
            help="fit normalization on the train split only, or on all data",
        )
        if with_window:
            p.add_argument(
                "--window",
                type=int,
                default=1,
                help="lag vectors per sample for recurrent cells (default 1)",
            )

    p = sub.add_parser("sweep", help="train the full architecture x hidden-size grid")
    add_training_flags(p)
    p.add_argument("--pair", default="UNKNOWN", help="currency pair label for the report")
    p.add_argument(
        "--archs",
        default="mlp,srnn,lstm,gru",
        help="comma-separated subset of mlp,srnn,lstm,gru",
    )
    p.add_argument("--hidden", default="2..10", help="hidden sizes: '2..10', '5', or '2,5,7'")
    p.add_argument(
        "--select",
        choices=("test", "val"),
        default="test",
        help="selection criterion (test or validation MAE)",
    )
    p.add_argument("--report", required=True, help="output report CSV path")
    p.add_argument(
        "--timings",
        action="store_true",
        help="record measured wall_time_s per trial (breaks byte-identical reruns)",
    )
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("train", help="train a single model and save it")
    add_training_flags(p)
    p.add_argument("--arch", required=True, help="one of mlp,srnn,lstm,gru")
    p.add_argument("--hidden", type=int, required=True, help="hidden layer size")
    p.add_argument("--model-out", required=True, help="output model file path")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="emit an actual-vs-predicted series from a saved model")
    p.add_argument("--model", required=True, help="model file from the train command")
    p.add_argument("--data", required=True, help="dataset CSV to predict over")
    p.add_argument("--series-out", required=True, help="output CSV (date,actual,predicted)")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("report", help="format an existing sweep report (no retraining)")
    p.add_argument("--in", dest="infile", required=True, help="report CSV from the sweep command")
    p.add_argument("--format", choices=("table", "csv"), default="table", help="output format")
    p.add_argument(
        "--select",
        choices=("test", "val"),
        default="test",
        help="criterion used for best-model marks",
    )
    p.set_defaults(func=cmd_report)

    return parser


def _fail(message: str, code: int) -> int:
    line = " ".join(str(message).split()) or "unknown error"
    print(f"fxbench: error: {line}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        _setup_logging()
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as e:
        return _fail(str(e), 2)
    except (ValueError, OSError, TrainingDiverged) as e:
        return _fail(str(e), 1)
    except SystemExit as e:  # argparse --help
        return int(e.code or 0)


def entrypoint() -> None:
    raise SystemExit(main())
