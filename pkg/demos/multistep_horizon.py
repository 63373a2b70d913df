"""Five days out from fourteen days back, in one shared network.

The multistep forecaster reads a 14-day lookback and emits days 1
through 5 ahead from a single stacked LSTM: during training the true
next values are fed back in (teacher forcing), at inference the model's
own predictions are.  Error should grow with the horizon; the per-step
RMSEs printed below show how quickly.
"""

import datetime as dt

from leancast import (chronological_split, default_network_config, evaluate,
                      fit_forecaster, forecast_multistep, generate_synthetic,
                      make_windows)

series = generate_synthetic("ar1", 120, 11, alpha=0.8, sigma=1.0)
split = chronological_split(series, 0.7)
print(f"{len(series)} days of AR(1), alpha=0.8 -> "
      f"{len(split.train)} train / {len(split.test)} test")

config = default_network_config("multistep_14_5", seed=11)
windows = make_windows(split.train.values, lookback=14, horizon=5)
print(f"training on {len(windows.inputs)} windows "
      f"({config.layers} layers x {config.hidden} hidden, "
      f"{config.epochs} epochs)...")
model = fit_forecaster("multistep_14_5", split, config=config)
print(f"final training loss {model.metadata['final_loss']:.5f}")

row = evaluate(model, split, leaning=None, metric="synthetic")
print("\nper-step test RMSE (days ahead 1..5):")
for step, value in enumerate(row.per_step_rmse, start=1):
    bar = "#" * int(round(value * 10))
    print(f"  +{step} day: {value:.3f} {bar}")
print(f"  pooled: {row.test_rmse:.3f}")

preds = forecast_multistep(model, series.values[-14:])
print(f"\nforecast beyond {series.end_date.isoformat()}:")
for step, value in enumerate(preds, start=1):
    day = series.end_date + dt.timedelta(days=step)
    print(f"  {day.isoformat()}: {value:+.3f}")
