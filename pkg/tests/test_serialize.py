import json
import math

import numpy as np
import pytest

from fxbench import (
    ARCHS,
    EvalResult,
    ModelSpec,
    NormParams,
    SweepReport,
    TrialResult,
    emit_report_csv,
    emit_series_csv,
    init_model,
    load_model,
    parse_report_csv,
    render_report_table,
    save_model,
)
from fxbench.serialize import FORMAT_VERSION, REPORT_COLUMNS

import datetime as dt


def sample_norm():
    return NormParams(
        feature_min=np.array([1.0, 2.0, 0.5, 1.1]),
        feature_max=np.array([2.0, 3.0, 1.5, 2.1]),
        target_min=1.1,
        target_max=2.1,
    )


# ---------------------------------------------------------------- models


def test_save_load_save_is_a_byte_fixed_point():
    for arch in ARCHS:
        model = init_model(ModelSpec(arch=arch, hidden=5), 77)
        blob = save_model(model, sample_norm())
        loaded, norm = load_model(blob)
        assert save_model(loaded, norm) == blob


def test_loaded_model_is_bitwise_identical():
    model = init_model(ModelSpec(arch="gru", hidden=4, window=2), 3)
    model.epochs_trained = 12
    loaded, norm = load_model(save_model(model, sample_norm()))
    assert loaded.spec == model.spec
    assert loaded.epochs_trained == 12
    assert set(loaded.params) == set(model.params)
    for name, arr in model.params.items():
        assert np.array_equal(loaded.params[name], arr)
    assert norm is not None and norm.same_as(sample_norm())


def test_model_without_norm_round_trips():
    model = init_model(ModelSpec(arch="mlp", hidden=2), 1)
    loaded, norm = load_model(save_model(model, None))
    assert norm is None
    assert save_model(loaded, None) == save_model(model, None)


def test_lstm_file_declares_exactly_its_ten_arrays():
    model = init_model(ModelSpec(arch="lstm", hidden=5), 9)
    doc = json.loads(save_model(model, sample_norm()).decode("utf-8"))
    assert doc["format_version"] == FORMAT_VERSION
    assert doc["arch"] == "lstm"
    assert sorted(doc["params"]) == sorted(
        ["W_i", "b_i", "W_f", "b_f", "W_o", "b_o", "W_c", "b_c", "W_out", "b_out"]
    )
    assert doc["params"]["W_i"]["shape"] == [5, 9]
    assert len(doc["params"]["W_i"]["data"]) == 45


def test_load_rejects_corrupted_shape_naming_the_array():
    model = init_model(ModelSpec(arch="srnn", hidden=3), 4)
    doc = json.loads(save_model(model, None).decode("utf-8"))
    doc["params"]["W_h"]["shape"] = [3, 99]
    with pytest.raises(ValueError, match="W_h"):
        load_model(json.dumps(doc).encode("utf-8"))
    doc = json.loads(save_model(model, None).decode("utf-8"))
    doc["params"]["b"]["data"] = doc["params"]["b"]["data"][:-1]
    with pytest.raises(ValueError, match="'b'"):
        load_model(json.dumps(doc).encode("utf-8"))


def test_load_rejects_missing_and_unknown_arrays():
    model = init_model(ModelSpec(arch="mlp", hidden=2), 4)
    doc = json.loads(save_model(model, None).decode("utf-8"))
    del doc["params"]["b_out"]
    with pytest.raises(ValueError, match="b_out"):
        load_model(json.dumps(doc).encode("utf-8"))
    doc = json.loads(save_model(model, None).decode("utf-8"))
    doc["params"]["W_extra"] = doc["params"]["W_out"]
    with pytest.raises(ValueError, match="W_extra"):
        load_model(json.dumps(doc).encode("utf-8"))


def test_load_rejects_future_format_version():
    model = init_model(ModelSpec(arch="mlp", hidden=2), 4)
    doc = json.loads(save_model(model, None).decode("utf-8"))
    doc["format_version"] = FORMAT_VERSION + 1
    with pytest.raises(ValueError, match="format_version"):
        load_model(json.dumps(doc).encode("utf-8"))


def test_load_rejects_truncated_and_non_json_bytes():
    model = init_model(ModelSpec(arch="mlp", hidden=2), 4)
    blob = save_model(model, None)
    with pytest.raises(ValueError, match="model file"):
        load_model(blob[: len(blob) // 2])
    with pytest.raises(ValueError, match="model file"):
        load_model(b"\x00\x01binary junk")


# ---------------------------------------------------------------- series csv


def test_series_csv_layout_and_reparse():
    result = EvalResult(
        mae=0.75,
        mae_norm=0.075,
        predictions=[
            (dt.date(2018, 1, 2), 110.0, 110.5),
            (dt.date(2018, 1, 3), 112.0, 111.0),
        ],
        n=2,
    )
    text = emit_series_csv(result).decode("utf-8")
    lines = text.splitlines()
    assert lines[0] == "date,actual,predicted"
    assert len(lines) == 3
    assert lines[1].startswith("2018-01-02,")
    maes = []
    for line in lines[1:]:
        _, actual, predicted = line.split(",")
        maes.append(abs(float(actual) - float(predicted)))
    assert np.mean(maes) == pytest.approx(result.mae, abs=1e-9)


def test_series_csv_rejects_empty():
    empty = EvalResult(mae=float("nan"), mae_norm=float("nan"), predictions=[], n=0)
    with pytest.raises(ValueError, match="empty"):
        emit_series_csv(empty)


# ---------------------------------------------------------------- report csv


def trial(arch, hidden, test_mae, pair="EUR/USD", seed=0):
    return TrialResult(
        pair=pair,
        arch=arch,
        structure=f"4-{hidden}-1",
        hidden=hidden,
        train_mae=test_mae / 2,
        val_mae=test_mae * 1.5,
        test_mae=test_mae,
        seed=seed,
        wall_time_s=0.0,
    )


def small_report():
    trials = [
        trial("mlp", 6, 0.0858),
        trial("srnn", 4, 0.019),
        trial("gru", 7, 0.084),
        trial("lstm", 5, 0.013),
    ]
    return SweepReport(trials=trials, archs=ARCHS, hiddens=(4, 5, 6, 7))


def test_report_csv_header_is_exact():
    text = emit_report_csv(small_report()).decode("utf-8")
    assert text.splitlines()[0] == ",".join(REPORT_COLUMNS)
    assert text.splitlines()[0] == (
        "pair,arch,structure,hidden,train_mae,val_mae,test_mae,seed,wall_time_s"
    )


def test_report_csv_round_trips_to_equal_report():
    report = small_report()
    blob = emit_report_csv(report)
    back = parse_report_csv(blob)
    assert back == report
    assert emit_report_csv(back) == blob


def test_report_csv_orders_rows_canonically():
    shuffled = SweepReport(
        trials=list(reversed(small_report().trials)),
        archs=ARCHS,
        hiddens=(4, 5, 6, 7),
    )
    rows = emit_report_csv(shuffled).decode("utf-8").splitlines()[1:]
    assert [r.split(",")[1] for r in rows] == ["mlp", "srnn", "gru", "lstm"]


def test_report_csv_keeps_float_precision():
    value = 0.1234567890123456789
    report = SweepReport(trials=[trial("mlp", 2, value)], archs=("mlp",), hiddens=(2,))
    back = parse_report_csv(emit_report_csv(report))
    assert back.trials[0].test_mae == report.trials[0].test_mae


def test_report_csv_represents_failed_trials_as_nan():
    report = SweepReport(
        trials=[trial("mlp", 2, float("nan"))], archs=("mlp",), hiddens=(2,)
    )
    text = emit_report_csv(report).decode("utf-8")
    assert ",nan," in text.splitlines()[1] + ","
    back = parse_report_csv(emit_report_csv(report))
    assert math.isnan(back.trials[0].test_mae)


def test_parse_report_rejects_bad_header_and_rows():
    with pytest.raises(ValueError, match="header"):
        parse_report_csv(b"pair,arch\nx,y\n")
    good = emit_report_csv(small_report()).decode("utf-8").splitlines()
    broken = "\n".join([good[0], good[1].replace("mlp", "dnn")]) + "\n"
    with pytest.raises(ValueError, match="line 2"):
        parse_report_csv(broken.encode("utf-8"))
    short = "\n".join([good[0], "only,three,fields"]) + "\n"
    with pytest.raises(ValueError, match="line 2"):
        parse_report_csv(short.encode("utf-8"))


# ---------------------------------------------------------------- table


def test_rendered_table_marks_per_arch_and_overall_best():
    table = render_report_table(small_report())
    assert "LSTM,4-5-1,0.013" in table
    assert "Overall best: LSTM,4-5-1,0.013" in table
    lines = table.splitlines()
    starred = [ln for ln in lines if "**" in ln]
    assert len(starred) == 1 and "LSTM" in starred[0]
    single = [ln for ln in lines if "*" in ln and "**" not in ln]
    assert len(single) == 3  # the other three per-arch bests


def test_rendered_table_second_reference_grid():
    trials = [
        trial("mlp", 9, 0.052, pair="GBP/NPR"),
        trial("srnn", 6, 0.214, pair="GBP/NPR"),
        trial("gru", 7, 0.0177, pair="GBP/NPR"),
        trial("lstm", 5, 0.0388, pair="GBP/NPR"),
    ]
    report = SweepReport(trials=trials, archs=ARCHS, hiddens=(5, 6, 7, 9))
    table = render_report_table(report)
    assert "Overall best: GRU,4-7-1,0.0177" in table


def test_rendered_table_handles_all_diverged():
    report = SweepReport(
        trials=[trial("mlp", 2, float("nan"))], archs=("mlp",), hiddens=(2,)
    )
    table = render_report_table(report)
    assert "No successful trials" in table
