#!/usr/bin/env python3
"""End-to-end forecasting benchmark over three synthetic currency pairs.

For each pair this script generates a seeded random-walk OHLC series,
sweeps all four architectures over hidden sizes 2..10 (36 trials), writes
the per-pair report CSV plus a rendered table, then retrains the winning
configuration and emits its actual-vs-predicted test series. A final
summary compares every winner against the persistence baseline
(predicting tomorrow's close as today's).

Full scale (1500 epochs per trial) takes a few hours of CPU time; pass
--quick for a 200-epoch version that finishes in a few minutes.

Example:
    python3 scripts/run_benchmark.py --out results --quick
"""

import argparse
import pathlib
import sys
import time

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from fxbench import (
    ARCHS,
    ModelSpec,
    SplitDataset,
    TrainConfig,
    build_supervised,
    chrono_split,
    default_config,
    emit_report_csv,
    emit_series_csv,
    evaluate,
    fit_minmax,
    init_model,
    normalize_dataset,
    persistence_baseline,
    random_walk_ohlc,
    render_report_table,
    run_sweep,
    save_model,
    select_best,
    train,
    trial_seed,
    write_ohlc_csv,
)

# label, noise seed, daily move as a fraction of the level
PAIRS = (
    ("SYN/ALPHA", 101, 0.001),
    ("SYN/BETA", 202, 0.002),
    ("SYN/GAMMA", 303, 0.0005),
)


def load_split(records, fit_norm="train"):
    dataset = build_supervised(records)
    split = chrono_split(dataset)
    norm = fit_minmax(dataset if fit_norm == "all" else split.train)
    return (
        SplitDataset(
            train=normalize_dataset(split.train, norm),
            validation=normalize_dataset(split.validation, norm),
            test=normalize_dataset(split.test, norm),
            fractions=split.fractions,
        ),
        norm,
    )


def benchmark_pair(pair, seed, step_frac, out_dir, config):
    slug = pair.replace("/", "_").lower()
    records = random_walk_ohlc(1500, seed=seed, step_frac=step_frac)
    write_ohlc_csv(records, out_dir / f"{slug}_data.csv")
    data, norm = load_split(records)

    t0 = time.perf_counter()
    report = run_sweep(ARCHS, range(2, 11), data, config, pair=pair, measure_time=True)
    elapsed = time.perf_counter() - t0
    (out_dir / f"{slug}_report.csv").write_bytes(emit_report_csv(report))
    (out_dir / f"{slug}_report.txt").write_text(render_report_table(report))

    best = select_best(report, "test_mae").overall
    print(f"{pair}: swept 36 trials in {elapsed:.0f}s, "
          f"best {best.arch.upper()} {best.structure} test MAE {best.test_mae:.6g}")

    # retrain the winner (same per-trial seed, so the same model) to save
    # its weights and emit the test-set series for plotting
    spec = ModelSpec(arch=best.arch, hidden=best.hidden)
    model = init_model(spec, trial_seed(config.seed, best.arch, best.hidden))
    train(model, data.train, data.validation, config)
    (out_dir / f"{slug}_best_model.json").write_bytes(save_model(model, norm))
    result = evaluate(model, data.test, norm)
    (out_dir / f"{slug}_best_test_series.csv").write_bytes(emit_series_csv(result))

    baseline = persistence_baseline(data.test, norm)
    return pair, best, result.mae, baseline


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="results", help="output directory")
    parser.add_argument("--epochs", type=int, default=1500, help="epochs per trial")
    parser.add_argument("--batch", type=int, default=32, help="mini-batch size")
    parser.add_argument("--seed", type=int, default=42, help="base seed for the grid")
    parser.add_argument(
        "--quick", action="store_true", help="use 200 epochs for a fast smoke run"
    )
    args = parser.parse_args(argv)

    out_dir = pathlib.Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    epochs = 200 if args.quick else args.epochs
    config = TrainConfig(
        optimizer=default_config("rmsprop"),
        epochs=epochs,
        batch_size=args.batch,
        seed=args.seed,
    )

    print(f"benchmark: 3 pairs x 36 trials at {epochs} epochs -> {out_dir}/")
    rows = [benchmark_pair(p, s, f, out_dir, config) for p, s, f in PAIRS]

    print()
    print(f"{'pair':<10} {'best':<14} {'test MAE':>12} {'persistence':>12} {'ratio':>7}")
    for pair, best, mae, baseline in rows:
        label = f"{best.arch.upper()} {best.structure}"
        print(f"{pair:<10} {label:<14} {mae:>12.6g} {baseline:>12.6g} {mae / baseline:>7.3f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
