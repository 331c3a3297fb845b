"""Synthetic OHLC series generators for benchmarks and sanity checks.

Two generators: a multiplicative random walk (close moves by a uniform
fraction of its level each day) and a noiseless constant-increment ramp.
Both emit records that satisfy the OHLC sanity constraints
low <= min(open, close) and high >= max(open, close), with strictly
increasing dates, so they pass strict ingestion.
"""

from __future__ import annotations

import datetime as dt

import numpy as np

from .data import OhlcRecord

DEFAULT_START_DATE = dt.date(2018, 1, 1)


def random_walk_ohlc(
    n: int,
    seed: int,
    start: float = 100.0,
    step_frac: float = 0.001,
    start_date: dt.date = DEFAULT_START_DATE,
) -> list[OhlcRecord]:
    """Random-walk series: close_t = close_{t-1} * (1 + u_t), u_t ~ U(-s, s).

    Each day opens at the previous close; high/low pad the open/close
    envelope by a small random non-negative fraction of the level.
    """
    if n < 1:
        raise ValueError(f"need n >= 1 records, got {n}")
    if not (0 < step_frac < 1):
        raise ValueError(f"step_frac must be in (0, 1), got {step_frac}")
    if start <= 0:
        raise ValueError(f"start price must be positive, got {start}")
    rng = np.random.default_rng(seed)
    steps = rng.uniform(-step_frac, step_frac, size=n)
    pads = rng.uniform(0.0, step_frac / 2, size=(n, 2))
    records = []
    prev_close = start
    for t in range(n):
        open_ = prev_close
        close = prev_close * (1.0 + steps[t])
        hi_base = max(open_, close)
        lo_base = min(open_, close)
        records.append(
            OhlcRecord(
                date=start_date + dt.timedelta(days=t),
                open=open_,
                high=hi_base * (1.0 + pads[t, 0]),
                low=lo_base * (1.0 - pads[t, 1]),
                close=close,
            )
        )
        prev_close = close
    return records


def ramp_ohlc(
    n: int,
    increment: float = 0.05,
    start: float = 100.0,
    start_date: dt.date = DEFAULT_START_DATE,
) -> list[OhlcRecord]:
    """Noiseless ramp: close_t = start + t * increment, open at prior close.

    Deterministic by construction (no RNG). The high/low pad is a fixed
    quarter-increment so every feature column still has a nonzero range.
    """
    if n < 1:
        raise ValueError(f"need n >= 1 records, got {n}")
    if increment <= 0:
        raise ValueError(f"increment must be positive, got {increment}")
    if start <= 0:
        raise ValueError(f"start price must be positive, got {start}")
    pad = increment * 0.25
    records = []
    for t in range(n):
        close = start + t * increment
        open_ = close - increment if t > 0 else start
        records.append(
            OhlcRecord(
                date=start_date + dt.timedelta(days=t),
                open=open_,
                high=max(open_, close) + pad,
                low=min(open_, close) - pad,
                close=close,
            )
        )
    return records
