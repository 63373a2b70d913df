"""Named forecasting model configurations behind one fitting and
prediction contract.

Five kinds are available:

====================  =========================================
kind                  meaning
====================  =========================================
sarima                seasonal ARIMA on the raw series
lstm_1day             LSTM fed yesterday's value only
lstm_14day            LSTM fed the last 14 days as one flat vector
gru_14day             GRU fed the last 14 days as one flat vector
multistep_14_5        teacher-forced LSTM, 14 days in, 5 days out
====================  =========================================

Neural kinds min-max scale with a scaler fit on the training half only and
report on the original scale; SARIMA works on raw values (identity scaler).
The 14-day kinds consume the lookback flat (a single cell step over a
14-dimensional input); passing a network config with input_size=1 switches
to a 14-step sequence presentation instead.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, asdict

import numpy as np

from . import neural, optim, sarima
from .neural import NetworkConfig, RecurrentNetwork, TrainingDivergedError
from .rng import derive_rng, derive_seed
from .series import (IDENTITY_SCALER, ScalerState, SplitPair, WindowSet,
                     fit_scaler, make_windows)

KINDS = ("sarima", "lstm_1day", "lstm_14day", "gru_14day", "multistep_14_5")

# kind -> (cell, lookback, horizon); sarima conditions on full history
_NEURAL_SHAPES = {
    "lstm_1day": ("lstm", 1, 1),
    "lstm_14day": ("lstm", 14, 1),
    "gru_14day": ("gru", 14, 1),
    "multistep_14_5": ("lstm", 14, 5),
}


def kind_lookback(kind: str) -> int:
    return _NEURAL_SHAPES[kind][1] if kind in _NEURAL_SHAPES else 1


def kind_horizon(kind: str) -> int:
    return _NEURAL_SHAPES[kind][2] if kind in _NEURAL_SHAPES else 1


@dataclass
class TrainedForecaster:
    kind: str
    model: object                  # SarimaFit or RecurrentNetwork
    scaler: ScalerState
    metadata: dict

    @property
    def lookback(self) -> int:
        return kind_lookback(self.kind)

    @property
    def horizon(self) -> int:
        return kind_horizon(self.kind)


def default_network_config(kind: str, seed: int = 0, **overrides) -> NetworkConfig:
    """Per-kind network defaults; keyword overrides win."""
    if kind not in _NEURAL_SHAPES:
        raise ValueError(f"no network config for kind {kind!r}")
    cell, lookback, horizon = _NEURAL_SHAPES[kind]
    base = dict(cell=cell, layers=4, hidden=32, input_size=lookback,
                output_size=1, dropout=0.0, seed=seed, learning_rate=0.001,
                epochs=500, batch_size=8, optimizer="rmsprop")
    if kind == "gru_14day":
        base.update(dropout=0.2, optimizer="adam", learning_rate=0.002,
                    epochs=500, batch_size=16)
    elif kind == "multistep_14_5":
        base.update(layers=8, hidden=8, input_size=1, epochs=125,
                    learning_rate=0.005, batch_size=0)
    base.update(overrides)
    return NetworkConfig(**base)


def fit_forecaster(kind: str, split: SplitPair, config=None, seed: int = 0) -> TrainedForecaster:
    """Fit one model kind on the training half of ``split``.

    ``config`` is a SarimaSpec or GridSpec for kind="sarima", an optional
    NetworkConfig for the neural kinds (defaults are used when omitted).
    """
    if kind not in KINDS:
        raise ValueError(f"unknown forecaster kind {kind!r}; expected one of {KINDS}")
    train_values = split.train.values

    if kind == "sarima":
        if isinstance(config, sarima.GridSpec):
            result = sarima.grid_search(train_values, config, seed=seed)
            fit, spec = result.fit, result.spec
            meta = {"seed": seed, "grid_candidates": len(result.candidates),
                    "converged": fit.converged, "sse": fit.sse}
        elif isinstance(config, sarima.SarimaSpec):
            fit = sarima.fit(train_values, config, seed=seed)
            spec = config
            meta = {"seed": seed, "converged": fit.converged, "sse": fit.sse}
        else:
            raise TypeError("sarima requires a SarimaSpec or GridSpec config")
        meta["spec"] = spec.as_tuple()
        return TrainedForecaster("sarima", fit, IDENTITY_SCALER, meta)

    cell, lookback, horizon = _NEURAL_SHAPES[kind]
    minimum = lookback + horizon
    if len(train_values) < minimum:
        raise ValueError(
            f"kind {kind!r} needs at least {minimum} training points "
            f"(lookback {lookback} + horizon {horizon}), got {len(train_values)}")
    if config is None:
        config = default_network_config(kind, seed=seed)
    if config.cell != cell:
        raise ValueError(f"kind {kind!r} uses a {cell} cell, config says {config.cell!r}")
    scaler = fit_scaler(train_values)
    windows = make_windows(scaler.apply(train_values), lookback, horizon)
    if kind == "multistep_14_5":
        net, history = train_multistep_teacher_forced(config, windows)
        final = history[-1].total if history else float("nan")
    else:
        net, losses = neural.train(config, windows)
        final = losses[-1] if losses else float("nan")
    meta = {"seed": config.seed, "epochs_run": config.epochs, "final_loss": final}
    return TrainedForecaster(kind, net, scaler, meta)


def predict_next(model: TrainedForecaster, history) -> float:
    """One-step-ahead prediction on the original scale.

    ``history`` is the full value history up to and including today; the
    model conditions on its own lookback's worth of the tail (SARIMA uses
    everything).
    """
    history = np.asarray(history, dtype=np.float64)
    if model.kind == "sarima":
        return float(sarima.forecast(model.model, history, 1)[0])
    lookback = model.lookback
    if len(history) < lookback:
        raise ValueError(f"history has {len(history)} values; need at least {lookback}")
    scaled = model.scaler.apply(history[-lookback:])
    net = model.model
    if model.kind == "multistep_14_5":
        preds, _ = decode_multistep(net, scaled, 1)
        return float(model.scaler.invert(preds)[0])
    if net.config.input_size == lookback:
        x = scaled[None, None, :]
    else:
        x = scaled[None, :, None]
    outputs, _ = net.forward(x)
    return float(model.scaler.invert(outputs[:, -1, 0])[0])


# -- teacher-forced multistep -------------------------------------------


@dataclass(frozen=True)
class MultistepEpochLoss:
    total: float
    per_step: tuple


def teacher_forced_inputs(windows: WindowSet) -> np.ndarray:
    """Decoder input tensor for teacher-forced training.

    Shape (count, L+H-1, 1): positions 0..L-1 hold the lookback, position
    L-1+j holds the ground-truth target for step j (j = 1..H-1).  The
    output read at position L-2+k is the prediction of step k, so step 1's
    input is the last lookback day and step k's input (k > 1) is the true
    value of step k-1, never the model's own output.
    """
    lead = windows.inputs
    truth = windows.targets[:, :-1]
    return np.concatenate([lead, truth], axis=1)[:, :, None]


def multistep_positions(lookback: int, horizon: int) -> list:
    """Time indices whose outputs are the H predictions."""
    return [lookback - 1 + k for k in range(horizon)]


def multistep_loss(preds: np.ndarray, targets: np.ndarray):
    """Sum over steps of per-step MSE; returns (total, per-step terms)."""
    err = preds - targets
    per_step = [float(np.mean(err[:, k] * err[:, k])) for k in range(err.shape[1])]
    return float(sum(per_step)), tuple(per_step)


def train_multistep_teacher_forced(config: NetworkConfig, windows: WindowSet):
    """Train one shared stacked network on all 5 steps at once.

    The network is unrolled over lookback + horizon - 1 time steps per
    window; during training the decoder positions see ground truth (teacher
    forcing), and the loss is the sum of the per-step MSEs.  Returns the
    network and a per-epoch list of MultistepEpochLoss.
    """
    if windows.count == 0:
        raise ValueError("cannot train on an empty window set")
    if config.input_size != 1:
        raise ValueError("teacher-forced training is sequence mode; input_size must be 1")
    if config.output_size != 1:
        raise ValueError("output_size must be 1; the horizon is unrolled over time")
    lookback, horizon = windows.lookback, windows.horizon
    if horizon < 2:
        raise ValueError(f"horizon {horizon} leaves nothing to teacher-force; need >= 2")
    x_all = teacher_forced_inputs(windows)
    t_all = windows.targets
    positions = multistep_positions(lookback, horizon)

    net = RecurrentNetwork(config)
    params = net.parameters()
    state = optim.init_optimizer(config.optimizer, params)
    shuffle_rng = derive_rng(config.seed, "shuffle")
    dropout_rng = derive_rng(config.seed, "dropout")
    n = windows.count
    batch = n if config.batch_size in (0, None) else min(config.batch_size, n)

    history = []
    last_finite = float("nan")
    for epoch in range(config.epochs):
        order = shuffle_rng.permutation(n)
        epoch_losses = []
        for start in range(0, n, batch):
            idx = order[start:start + batch]
            x = x_all[idx]
            target = t_all[idx]
            outputs, cache = net.forward(x, training=True, dropout_rng=dropout_rng)
            preds = outputs[:, positions, 0]
            total, per_step = multistep_loss(preds, target)
            if not np.isfinite(total):
                raise TrainingDivergedError(epoch, last_finite)
            last_finite = total
            epoch_losses.append(MultistepEpochLoss(total, per_step))
            d_outputs = np.zeros_like(outputs)
            d_outputs[:, positions, 0] = 2.0 * (preds - target) / len(idx)
            grads = net.backward(cache, d_outputs)
            grads = optim.clip_global_norm(grads, neural.GRAD_CLIP_NORM)
            params = net.parameters()
            params, state = optim.optimizer_step(params, grads, state, config.learning_rate)
            net.set_parameters(params)
        history.append(MultistepEpochLoss(
            float(np.mean([e.total for e in epoch_losses])),
            tuple(np.mean([e.per_step for e in epoch_losses], axis=0).tolist())))
    return net, history


def decode_multistep(net: RecurrentNetwork, scaled_values: np.ndarray, horizon: int):
    """Autoregressive decoding in scaled space.

    Re-runs the full forward pass each step, appending the model's own
    previous prediction to the input sequence (no ground truth involved).
    Returns (predictions, input sequence as finally consumed) so callers
    can verify what the decoder was fed.
    """
    seq = list(np.asarray(scaled_values, dtype=np.float64))
    lookback = len(seq)
    preds = []
    for _ in range(horizon):
        x = np.array(seq)[None, :, None]
        outputs, _ = net.forward(x)
        nxt = float(outputs[0, -1, 0])
        preds.append(nxt)
        seq.append(nxt)
    return np.array(preds), np.array(seq[:lookback + horizon - 1])


def forecast_multistep(model: TrainedForecaster, last_values) -> np.ndarray:
    """Predict the kind's full horizon from exactly one lookback window."""
    if model.kind != "multistep_14_5":
        raise ValueError(f"forecast_multistep needs a multistep model, got {model.kind!r}")
    values = np.asarray(last_values, dtype=np.float64)
    lookback, horizon = model.lookback, model.horizon
    if values.shape != (lookback,):
        raise ValueError(f"expected exactly {lookback} values, got shape {values.shape}")
    scaled = model.scaler.apply(values)
    preds, _ = decode_multistep(model.model, scaled, horizon)
    return model.scaler.invert(preds)


# -- serialization --------------------------------------------------------


def forecaster_to_json(model: TrainedForecaster) -> str:
    if model.kind == "sarima":
        fit = model.model
        payload = json.loads(sarima.to_json(fit.spec, fit.params))
        payload["train_rmse"] = fit.train_rmse
        payload["sse"] = fit.sse
        payload["converged"] = fit.converged
    else:
        payload = json.loads(model.model.to_json())
    doc = {"kind": model.kind,
           "scaler": {"min": model.scaler.min, "max": model.scaler.max},
           "model": payload,
           "metadata": model.metadata}
    return json.dumps(doc, sort_keys=True)


def forecaster_from_json(text: str) -> TrainedForecaster:
    doc = json.loads(text)
    kind = doc["kind"]
    if kind not in KINDS:
        raise ValueError(f"unknown forecaster kind {kind!r}")
    scaler = ScalerState(doc["scaler"]["min"], doc["scaler"]["max"])
    if kind == "sarima":
        payload = dict(doc["model"])
        spec, params = sarima.from_json(json.dumps(
            {k: payload[k] for k in ("order", "seasonal", "c", "alpha", "theta",
                                     "phi", "eta", "sigma2")}))
        fit = sarima.SarimaFit(spec=spec, params=params, residuals=np.array([]),
                               sse=payload.get("sse", 0.0),
                               converged=payload.get("converged", True),
                               train_rmse=payload.get("train_rmse", 0.0))
        return TrainedForecaster(kind, fit, scaler, doc.get("metadata", {}))
    net = RecurrentNetwork.from_json(json.dumps(doc["model"]))
    return TrainedForecaster(kind, net, scaler, doc.get("metadata", {}))
