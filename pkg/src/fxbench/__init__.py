"""fxbench: from-scratch neural time-series forecasting on OHLC data.

Pipeline: lag features from daily open/high/low/close -> min-max
normalization -> {MLP, SRNN, LSTM, GRU} x hidden-size grid sweep ->
MAE-based model selection -> denormalized prediction reports. Everything
(cells, backprop through time, optimizers) is implemented directly on
numpy arrays; runs are deterministic given their seeds.
"""

from .cells import (
    ARCHS,
    ForwardCache,
    ModelSpec,
    NetworkModel,
    backward,
    forward,
    forward_batch,
    init_model,
    parameter_count,
    param_shapes,
)
from .data import (
    DEFAULT_FRACTIONS,
    NormParams,
    OhlcRecord,
    SplitDataset,
    SupervisedDataset,
    build_supervised,
    chrono_split,
    denormalize,
    fit_minmax,
    normalize,
    normalize_dataset,
    parse_ohlc_csv,
    read_ohlc_csv,
    write_ohlc_csv,
)
from .experiment import (
    BestSelection,
    EvalResult,
    SweepReport,
    TrainConfig,
    TrainHistory,
    TrainingDiverged,
    TrialResult,
    evaluate,
    persistence_baseline,
    run_sweep,
    select_best,
    train,
    trial_seed,
)
from .optim import (
    OPTIMIZERS,
    Optimizer,
    OptimizerConfig,
    RmspropState,
    default_config,
    init_rmsprop,
    mae_grad,
    mae_loss,
    rmsprop_step,
    sgd_step,
)
from .serialize import (
    emit_report_csv,
    emit_series_csv,
    load_model,
    parse_report_csv,
    render_report_table,
    save_model,
)
from .synthetic import ramp_ohlc, random_walk_ohlc

__version__ = "0.1.0"

__all__ = [
    "ARCHS",
    "BestSelection",
    "DEFAULT_FRACTIONS",
    "EvalResult",
    "ForwardCache",
    "ModelSpec",
    "NetworkModel",
    "NormParams",
    "OPTIMIZERS",
    "OhlcRecord",
    "Optimizer",
    "OptimizerConfig",
    "RmspropState",
    "SplitDataset",
    "SupervisedDataset",
    "SweepReport",
    "TrainConfig",
    "TrainHistory",
    "TrainingDiverged",
    "TrialResult",
    "backward",
    "build_supervised",
    "chrono_split",
    "default_config",
    "denormalize",
    "emit_report_csv",
    "emit_series_csv",
    "evaluate",
    "fit_minmax",
    "forward",
    "forward_batch",
    "init_model",
    "init_rmsprop",
    "load_model",
    "mae_grad",
    "mae_loss",
    "normalize",
    "normalize_dataset",
    "parameter_count",
    "param_shapes",
    "parse_ohlc_csv",
    "parse_report_csv",
    "persistence_baseline",
    "ramp_ohlc",
    "random_walk_ohlc",
    "read_ohlc_csv",
    "render_report_table",
    "rmsprop_step",
    "run_sweep",
    "save_model",
    "select_best",
    "sgd_step",
    "train",
    "trial_seed",
    "write_ohlc_csv",
]
