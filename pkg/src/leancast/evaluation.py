"""RMSE, train/test evaluation runs, and report rendering.

One-step models are scored by rolling-origin evaluation: each test day is
predicted from the true history up to the previous day (the model never
conditions on its own test predictions).  The multistep model instead
slides complete 14-in/5-out windows across the test half and reports one
RMSE per step ahead plus their pooled value.  All RMSEs are on the
original data scale.
"""

from __future__ import annotations

import io
import csv
from dataclasses import dataclass

import numpy as np

from . import forecasters, sarima
from .forecasters import TrainedForecaster, forecast_multistep, predict_next
from .series import SplitPair, make_windows

CSV_COLUMNS = ("model", "leaning", "metric", "train_rmse", "test_rmse",
               "step1", "step2", "step3", "step4", "step5")


@dataclass(frozen=True)
class EvalRow:
    model: str
    leaning: str | None
    metric: str
    train_rmse: float | None
    test_rmse: float
    per_step_rmse: tuple | None = None

    def __post_init__(self):
        if self.test_rmse < 0 or (self.train_rmse is not None and self.train_rmse < 0):
            raise ValueError("RMSE cannot be negative")
        if self.per_step_rmse is not None and any(v < 0 for v in self.per_step_rmse):
            raise ValueError("RMSE cannot be negative")


@dataclass
class ReportTable:
    platform: str
    metric: str
    rows: list

    def __post_init__(self):
        seen = set()
        for row in self.rows:
            key = (row.model, row.leaning)
            if key in seen:
                raise ValueError(f"duplicate report cell {key}")
            seen.add(key)


def rmse(predicted, true) -> float:
    predicted = np.asarray(predicted, dtype=np.float64)
    true = np.asarray(true, dtype=np.float64)
    if predicted.shape != true.shape:
        raise ValueError(f"length mismatch: {predicted.shape} vs {true.shape}")
    if predicted.size == 0:
        raise ValueError("rmse of empty sequences is undefined")
    err = predicted - true
    return float(np.sqrt(np.mean(err * err)))


def rolling_one_step_predictions(model: TrainedForecaster, split: SplitPair) -> np.ndarray:
    """Predict every test day from true history (train plus earlier test)."""
    history = np.concatenate([split.train.values, split.test.values])
    n_train = len(split.train.values)
    preds = np.empty(len(split.test.values))
    for i in range(len(preds)):
        preds[i] = predict_next(model, history[:n_train + i])
    return preds


def multistep_window_predictions(model: TrainedForecaster, test_values: np.ndarray):
    """All complete lookback->horizon windows inside the test half.

    Returns (predictions, targets), each (windows, horizon).
    """
    lookback, horizon = model.lookback, model.horizon
    windows = make_windows(np.asarray(test_values, dtype=np.float64), lookback, horizon)
    if windows.count == 0:
        raise ValueError(
            f"test half has {len(test_values)} points; multistep evaluation "
            f"needs at least {lookback + horizon}")
    preds = np.empty_like(windows.targets)
    for i in range(windows.count):
        preds[i] = forecast_multistep(model, windows.inputs[i])
    return preds, windows.targets


def evaluate(model: TrainedForecaster, split: SplitPair,
             leaning: str | None = None, metric: str | None = None) -> EvalRow:
    """Score one fitted model on its split; see the module docstring for
    the per-kind protocol."""
    metric = metric if metric is not None else split.train.metric
    min_test = model.lookback + model.horizon
    if model.kind != "sarima" and len(split.test.values) < min_test:
        raise ValueError(
            f"test half has {len(split.test.values)} points; kind "
            f"{model.kind!r} needs at least {min_test}")

    if model.kind == "multistep_14_5":
        preds, targets = multistep_window_predictions(model, split.test.values)
        per_step = tuple(rmse(preds[:, k], targets[:, k]) for k in range(model.horizon))
        pooled = rmse(preds.ravel(), targets.ravel())
        return EvalRow(model.kind, leaning, metric, None, pooled, per_step)

    if model.kind == "sarima":
        train_rmse = model.model.train_rmse
        test_rmse = sarima.rolling_test_rmse(model.model, split.train.values,
                                             split.test.values)
        return EvalRow(model.kind, leaning, metric, train_rmse, test_rmse)

    # neural one-step kinds: in-sample windows for train, rolling for test
    scaled_train = model.scaler.apply(split.train.values)
    windows = make_windows(scaled_train, model.lookback, 1)
    if windows.count == 0:
        raise ValueError("training half too short to window")
    net = model.model
    if net.config.input_size == model.lookback:
        x = windows.inputs[:, None, :]
    else:
        x = windows.inputs[:, :, None]
    outputs, _ = net.forward(x)
    train_preds = model.scaler.invert(outputs[:, -1, 0])
    train_true = model.scaler.invert(windows.targets[:, 0])
    train_rmse = rmse(train_preds, train_true)
    test_preds = rolling_one_step_predictions(model, split)
    test_rmse = rmse(test_preds, split.test.values)
    return EvalRow(model.kind, leaning, metric, train_rmse, test_rmse)


# -- rendering -------------------------------------------------------------


def _cell(value) -> str:
    return "" if value is None else f"{value:.2f}"


def render_report_csv(tables) -> str:
    """Two-decimal CSV, one line per row, stable row order."""
    out = io.StringIO()
    out.write(",".join(CSV_COLUMNS) + "\n")
    for table in tables:
        for row in sorted(table.rows, key=lambda r: (r.model, r.leaning or "")):
            steps = row.per_step_rmse or (None,) * 5
            cells = [row.model, row.leaning or "", row.metric,
                     _cell(row.train_rmse), _cell(row.test_rmse)] + [_cell(v) for v in steps]
            out.write(",".join(cells) + "\n")
    return out.getvalue()


def render_report_text(tables) -> str:
    """Aligned plain-text rendering for terminals."""
    lines = []
    for table in tables:
        lines.append(f"== {table.platform} / {table.metric} ==")
        widths = [len(c) for c in CSV_COLUMNS]
        rendered = []
        for row in sorted(table.rows, key=lambda r: (r.model, r.leaning or "")):
            steps = row.per_step_rmse or (None,) * 5
            cells = [row.model, row.leaning or "-", row.metric,
                     _cell(row.train_rmse) or "-", _cell(row.test_rmse)]
            cells += [_cell(v) or "-" for v in steps]
            rendered.append(cells)
            widths = [max(w, len(c)) for w, c in zip(widths, cells)]
        lines.append("  ".join(c.ljust(w) for c, w in zip(CSV_COLUMNS, widths)))
        for cells in rendered:
            lines.append("  ".join(c.ljust(w) for c, w in zip(cells, widths)))
        lines.append("")
    return "\n".join(lines)


def render_report(tables, fmt: str = "csv") -> str:
    if fmt == "csv":
        return render_report_csv(tables)
    if fmt == "text":
        return render_report_text(tables)
    raise ValueError(f"unknown report format {fmt!r}")


def parse_report_csv(text: str) -> list:
    """Inverse of render_report_csv (at its 2-decimal precision)."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != list(CSV_COLUMNS):
        raise ValueError(f"unexpected report header: {header}")
    rows = []
    for cells in reader:
        if not cells:
            continue
        if len(cells) != len(CSV_COLUMNS):
            raise ValueError(f"report row has {len(cells)} cells: {cells}")
        model, leaning, metric = cells[0], cells[1] or None, cells[2]
        train_rmse = float(cells[3]) if cells[3] else None
        test_rmse = float(cells[4])
        steps = tuple(float(c) for c in cells[5:] if c)
        per_step = steps if len(steps) == 5 else None
        rows.append(EvalRow(model, leaning, metric, train_rmse, test_rmse, per_step))
    return rows
