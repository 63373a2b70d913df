"""RMSProp and Adam parameter updates.

Parameters and gradients travel as name -> ndarray dicts.  Updates are
functional: the returned dicts hold fresh arrays, the inputs are untouched.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

RMSPROP_RHO = 0.9
ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
EPSILON = 1e-8


@dataclass
class OptimizerState:
    kind: str                      # "rmsprop" | "adam"
    accumulators: dict = field(default_factory=dict)
    t: int = 0                     # adam step counter


def init_optimizer(kind: str, params: dict) -> OptimizerState:
    if kind not in ("rmsprop", "adam"):
        raise ValueError(f"unknown optimizer {kind!r}")
    acc = {}
    for name, value in params.items():
        acc[name] = {"s": np.zeros_like(value)} if kind == "rmsprop" else {
            "m": np.zeros_like(value), "v": np.zeros_like(value)}
    return OptimizerState(kind=kind, accumulators=acc)


def rmsprop_step(params: dict, grads: dict, state: OptimizerState,
                 learning_rate: float) -> tuple[dict, OptimizerState]:
    """s <- rho*s + (1-rho)*g^2 ;  theta <- theta - lr * g / sqrt(s + eps)."""
    new_params, new_acc = {}, {}
    for name, theta in params.items():
        g = grads[name]
        s = RMSPROP_RHO * state.accumulators[name]["s"] + (1.0 - RMSPROP_RHO) * g * g
        new_params[name] = theta - learning_rate * g / np.sqrt(s + EPSILON)
        new_acc[name] = {"s": s}
    return new_params, OptimizerState(kind="rmsprop", accumulators=new_acc, t=state.t + 1)


def adam_step(params: dict, grads: dict, state: OptimizerState,
              learning_rate: float) -> tuple[dict, OptimizerState]:
    """Bias-corrected first/second moment update."""
    t = state.t + 1
    new_params, new_acc = {}, {}
    for name, theta in params.items():
        g = grads[name]
        m = ADAM_BETA1 * state.accumulators[name]["m"] + (1.0 - ADAM_BETA1) * g
        v = ADAM_BETA2 * state.accumulators[name]["v"] + (1.0 - ADAM_BETA2) * g * g
        m_hat = m / (1.0 - ADAM_BETA1 ** t)
        v_hat = v / (1.0 - ADAM_BETA2 ** t)
        new_params[name] = theta - learning_rate * m_hat / (np.sqrt(v_hat) + EPSILON)
        new_acc[name] = {"m": m, "v": v}
    return new_params, OptimizerState(kind="adam", accumulators=new_acc, t=t)


def optimizer_step(params, grads, state, learning_rate):
    step = rmsprop_step if state.kind == "rmsprop" else adam_step
    return step(params, grads, state, learning_rate)


def clip_global_norm(grads: dict, max_norm: float) -> dict:
    """Scale all gradients down together when their joint L2 norm exceeds
    ``max_norm``; keeps long-unroll training from diverging."""
    total = np.sqrt(sum(float(np.sum(g * g)) for g in grads.values()))
    if total <= max_norm or total == 0.0:
        return grads
    scale = max_norm / total
    return {name: g * scale for name, g in grads.items()}
