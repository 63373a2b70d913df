"""Bundled hyperparameter presets for the published experiments.

Four named bundles, one per (platform, metric) dataset.  Each carries the
per-leaning SARIMA orders and the neural training settings.  Leanings with
no published SARIMA order (the two Gab *_leaning series) are left out of
``sarima_specs``; callers fall back to grid search for those.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .forecasters import default_network_config
from .neural import NetworkConfig
from .sarima import GridSpec, SarimaSpec

LEANINGS = ("left", "left_leaning", "center", "right_leaning", "right")


@dataclass(frozen=True)
class PresetBundle:
    name: str
    platform: str
    metric: str
    sarima_specs: dict
    lstm_epochs: int
    gru_epochs: int
    multistep_epochs: int
    lstm_layers: int = 4
    hidden: int = 32
    multistep_layers: int = 8
    multistep_hidden: int = 8

    def network_config(self, kind: str, seed: int = 0, **overrides) -> NetworkConfig:
        """Kind defaults specialized by this bundle's epochs and layout."""
        base = {}
        if kind in ("lstm_1day", "lstm_14day"):
            base = dict(layers=self.lstm_layers, hidden=self.hidden,
                        epochs=self.lstm_epochs)
        elif kind == "gru_14day":
            base = dict(layers=self.lstm_layers, hidden=self.hidden,
                        epochs=self.gru_epochs)
        elif kind == "multistep_14_5":
            base = dict(layers=self.multistep_layers, hidden=self.multistep_hidden,
                        epochs=self.multistep_epochs)
        base.update(overrides)
        return default_network_config(kind, seed=seed, **base)

    def sarima_spec(self, leaning: str):
        """Published order for the leaning, or None (grid-search fallback)."""
        return self.sarima_specs.get(leaning)


def _spec(p, d, q, P, D, Q, s):
    return SarimaSpec(p=p, d=d, q=q, P=P, D=D, Q=Q, s=s)


_TWITTER_POSTS_SPEC = _spec(9, 0, 10, 2, 1, 1, 12)
_TWITTER_LIKES_SPEC = _spec(11, 1, 3, 3, 1, 3, 12)

PRESETS = {
    "twitter-posts": PresetBundle(
        name="twitter-posts", platform="twitter", metric="post_count",
        sarima_specs={leaning: _TWITTER_POSTS_SPEC for leaning in LEANINGS},
        lstm_epochs=100, gru_epochs=100, multistep_epochs=125),
    "twitter-likes": PresetBundle(
        name="twitter-likes", platform="twitter", metric="likes_sum",
        sarima_specs={leaning: _TWITTER_LIKES_SPEC for leaning in LEANINGS},
        lstm_epochs=100, gru_epochs=100, multistep_epochs=100),
    "gab-posts": PresetBundle(
        name="gab-posts", platform="gab", metric="post_count",
        sarima_specs={
            "left": _spec(7, 1, 10, 3, 1, 1, 14),
            "right": _spec(6, 2, 10, 4, 1, 1, 11),
            "center": _spec(11, 1, 10, 2, 1, 1, 14),
        },
        lstm_epochs=200, gru_epochs=100, multistep_epochs=150),
    "gab-likes": PresetBundle(
        name="gab-likes", platform="gab", metric="likes_sum",
        sarima_specs={
            "left": _spec(11, 1, 6, 3, 0, 4, 12),
            "right": _spec(9, 1, 11, 1, 1, 3, 12),
            "center": _spec(8, 1, 11, 4, 0, 0, 12),
        },
        lstm_epochs=200, gru_epochs=100, multistep_epochs=100),
}

# fallback grid for leanings with no published SARIMA order
FALLBACK_GRID = GridSpec(p=(0, 1, 2, 3), d=(0, 1), q=(0, 1, 2),
                         P=(0, 1), D=(0, 1), Q=(0, 1), s=(0, 7))


def get_preset(name: str) -> PresetBundle:
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(
            f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}") from None
