"""Seasonal ARIMA estimation via conditional sum of squares.

The model for the (optionally differenced) series y is additive in its
seasonal terms:

    y_t = c + sum_{n=1..p} alpha_n * y_{t-n}  + sum_{n=1..q} theta_n * e_{t-n}
            + sum_{n=1..P} phi_n   * y_{t-sn} + sum_{n=1..Q} eta_n   * e_{t-sn}
            + e_t

with e_t the one-step residual.  Estimation minimizes the conditional sum of
squares (pre-sample residuals fixed at zero) with a derivative-free simplex
search; no state-space likelihood is involved.  Order selection is a plain
grid search scored either by holdout one-step RMSE or by AIC.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np

from .simplex import nelder_mead

COEF_BOUND = 5.0  # coefficients are clamped to [-5, 5] during the search
SSE_TOL = 1e-8
MAX_ITER_PER_START = 5000
N_RANDOM_RESTARTS = 3


class GridSearchError(RuntimeError):
    """Raised when no grid candidate could be fitted; carries diagnostics."""

    def __init__(self, message, diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


@dataclass(frozen=True)
class SarimaSpec:
    """Orders (p, d, q) and seasonal orders (P, D, Q, s).  s = 0 disables
    the seasonal terms entirely."""

    p: int = 0
    d: int = 0
    q: int = 0
    P: int = 0
    D: int = 0
    Q: int = 0
    s: int = 0

    def __post_init__(self):
        for name in ("p", "d", "q", "P", "D", "Q", "s"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 0:
                raise ValueError(f"order {name} must be a nonnegative integer, got {v!r}")
        if (self.P > 0 or self.D > 0 or self.Q > 0) and self.s < 2:
            raise ValueError(f"seasonal orders require s >= 2, got s={self.s}")

    @property
    def order(self):
        return (self.p, self.d, self.q)

    @property
    def seasonal_order(self):
        return (self.P, self.D, self.Q, self.s)

    @property
    def burn_in(self) -> int:
        return max(self.p, self.s * self.P)

    @property
    def n_coefficients(self) -> int:
        return self.p + self.q + self.P + self.Q

    def as_tuple(self):
        return (self.p, self.d, self.q, self.P, self.D, self.Q, self.s)


@dataclass(frozen=True)
class SarimaParams:
    """Constant, coefficient vectors and innovation variance for one spec."""

    c: float = 0.0
    alpha: tuple = ()
    theta: tuple = ()
    phi: tuple = ()
    eta: tuple = ()
    sigma2: float = 0.0

    def __post_init__(self):
        for name in ("alpha", "theta", "phi", "eta"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))
        object.__setattr__(self, "c", float(self.c))
        object.__setattr__(self, "sigma2", float(self.sigma2))
        if self.sigma2 < 0:
            raise ValueError("sigma2 must be >= 0")

    def check_lengths(self, spec: SarimaSpec):
        expected = {"alpha": spec.p, "theta": spec.q, "phi": spec.P, "eta": spec.Q}
        for name, want in expected.items():
            got = len(getattr(self, name))
            if got != want:
                raise ValueError(f"{name} has {got} coefficients, spec requires {want}")


@dataclass(frozen=True)
class SarimaFit:
    spec: SarimaSpec
    params: SarimaParams
    residuals: np.ndarray        # one per evaluated time step, differenced scale
    sse: float
    converged: bool
    train_rmse: float


@dataclass(frozen=True)
class DifferencingContext:
    """Everything needed to undo (1-B)^d (1-B^s)^D exactly.

    ``stages[k]`` is the full series as it stood before the k-th differencing
    pass (ordinary passes first, then seasonal), paired with that pass's lag.
    Inversion restores the observed range from these retained values, so the
    round trip is lossless; entries appended beyond the observed range are
    integrated recursively, which is what forecasting needs.
    """

    d: int
    D: int
    s: int
    stages: tuple  # ((lag, values), ...) in application order


def difference(values, d: int, D: int, s: int) -> tuple[np.ndarray, DifferencingContext]:
    """Apply ordinary differencing d times, then seasonal differencing D times.

    Output length is n - d - D*s.  Raises ``ValueError`` when the series is
    too short to difference.
    """
    values = np.asarray(values, dtype=np.float64)
    if D > 0 and s < 2:
        raise ValueError("seasonal differencing requires s >= 2")
    if len(values) <= d + D * s:
        raise ValueError(
            f"series of length {len(values)} too short for d={d}, D={D}, s={s}")
    stages = []
    cur = values
    for _ in range(d):
        stages.append((1, cur))
        cur = cur[1:] - cur[:-1]
    for _ in range(D):
        stages.append((s, cur))
        cur = cur[s:] - cur[:-s]
    return cur, DifferencingContext(d=d, D=D, s=s, stages=tuple(stages))


def invert_difference(diffed, context: DifferencingContext) -> np.ndarray:
    """Undo the differencing recorded in ``context``.

    ``diffed`` may extend the series that produced the context (forecast
    values appended at the end); its leading entries are assumed unchanged.
    """
    cur = np.asarray(diffed, dtype=np.float64)
    for lag, prev in reversed(context.stages):
        out = np.empty(len(cur) + lag)
        n_known = min(len(prev), len(out))
        out[:n_known] = prev[:n_known]
        for t in range(n_known, len(out)):
            out[t] = cur[t - lag] + out[t - lag]
        cur = out
    return cur


def _residual_buffer(w, spec: SarimaSpec, params: SarimaParams) -> np.ndarray:
    """Residuals aligned with w; entries before the burn-in are zero."""
    params.check_lengths(spec)
    w = np.asarray(w, dtype=np.float64)
    n = len(w)
    burn = spec.burn_in
    if n < burn + 1:
        raise ValueError(f"need at least {burn + 1} observations, got {n}")
    alpha = np.asarray(params.alpha)
    theta = np.asarray(params.theta)
    phi = np.asarray(params.phi)
    eta = np.asarray(params.eta)
    p, q, P, Q, s = spec.p, spec.q, spec.P, spec.Q, spec.s
    eps = np.zeros(n)
    for t in range(burn, n):
        acc = params.c
        if p:
            acc += alpha @ w[t - p:t][::-1]
        if q:
            window = eps[max(0, t - q):t][::-1]  # eps_{t-1}, eps_{t-2}, ...
            acc += theta[:len(window)] @ window
        if P:
            acc += phi @ w[t - s * np.arange(1, P + 1)]
        if Q:
            idx = t - s * np.arange(1, Q + 1)
            ok = idx >= 0
            if ok.any():
                acc += eta[ok] @ eps[idx[ok]]
        eps[t] = w[t] - acc
    return eps


def css_residuals(w, spec: SarimaSpec, params: SarimaParams) -> tuple[np.ndarray, float]:
    """One-step residuals over the evaluated range t = burn_in .. n-1 and
    their sum of squares.  Pre-sample residuals are fixed at zero."""
    eps = _residual_buffer(w, spec, params)
    tail = eps[spec.burn_in:].copy()
    return tail, float(tail @ tail)


def _unpack(vec, spec: SarimaSpec) -> SarimaParams:
    coefs = np.clip(vec[1:], -COEF_BOUND, COEF_BOUND)
    p, q, P = spec.p, spec.q, spec.P
    return SarimaParams(
        c=float(vec[0]),
        alpha=coefs[:p],
        theta=coefs[p:p + q],
        phi=coefs[p + q:p + q + P],
        eta=coefs[p + q + P:],
    )


def fit(values, spec: SarimaSpec, seed: int = 0) -> SarimaFit:
    """Estimate (c, alpha, theta, phi, eta) by minimizing the CSS.

    Simplex descent from a zero start plus ``N_RANDOM_RESTARTS`` seeded
    perturbation starts; the zero parameter set is always kept as a floor,
    so the returned sse never exceeds the zero-model sse.
    """
    values = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(values)):
        raise ValueError("series contains non-finite values")
    w, _ = difference(values, spec.d, spec.D, spec.s)
    floor = 10 + spec.p + spec.q + spec.s * (spec.P + spec.Q)
    if len(w) < floor:
        raise ValueError(
            f"differenced length {len(w)} below identifiability floor {floor} for {spec}")

    n_params = 1 + spec.n_coefficients

    def objective(vec):
        _, sse = css_residuals(w, spec, _unpack(vec, spec))
        return sse

    zero = np.zeros(n_params)
    zero_sse = objective(zero)

    rng = np.random.default_rng(seed)
    starts = [zero] + [rng.uniform(-0.3, 0.3, n_params) for _ in range(N_RANDOM_RESTARTS)]
    best_x, best_sse, best_conv = zero, zero_sse, False
    for x0 in starts:
        x, val, conv = nelder_mead(objective, x0, f_tol=SSE_TOL, max_iter=MAX_ITER_PER_START)
        if val < best_sse:
            best_x, best_sse, best_conv = x, val, conv

    params = _unpack(best_x, spec)
    residuals, sse = css_residuals(w, spec, params)
    n_eval = len(residuals)
    params = SarimaParams(
        c=params.c, alpha=params.alpha, theta=params.theta,
        phi=params.phi, eta=params.eta, sigma2=sse / n_eval,
    )
    converged = best_conv and (best_sse < zero_sse or zero_sse == 0.0)
    return SarimaFit(
        spec=spec,
        params=params,
        residuals=residuals,
        sse=sse,
        converged=converged,
        train_rmse=float(np.sqrt(sse / n_eval)),
    )


def forecast(fitted: SarimaFit, history, horizon: int) -> np.ndarray:
    """Iterate the model ``horizon`` steps past the end of ``history``.

    Future residuals are set to zero and already-predicted values stand in
    for unobserved ones; differencing is undone so the result is on the
    original scale.  ``horizon`` = 0 yields an empty array.
    """
    if horizon < 0:
        raise ValueError("horizon must be >= 0")
    history = np.asarray(history, dtype=np.float64)
    spec, params = fitted.spec, fitted.params
    w, ctx = difference(history, spec.d, spec.D, spec.s)
    eps = _residual_buffer(w, spec, params)
    if horizon == 0:
        return np.empty(0)

    alpha = np.asarray(params.alpha)
    theta = np.asarray(params.theta)
    phi = np.asarray(params.phi)
    eta = np.asarray(params.eta)
    p, q, P, Q, s = spec.p, spec.q, spec.P, spec.Q, spec.s
    w_ext = np.concatenate([w, np.zeros(horizon)])
    eps_ext = np.concatenate([eps, np.zeros(horizon)])  # future residuals := 0
    n = len(w)
    for k in range(horizon):
        t = n + k
        acc = params.c
        if p:
            acc += alpha @ w_ext[t - p:t][::-1]
        if q:
            window = eps_ext[max(0, t - q):t][::-1]
            acc += theta[:len(window)] @ window
        if P:
            idx = t - s * np.arange(1, P + 1)
            ok = idx >= 0
            if ok.any():
                acc += phi[ok] @ w_ext[idx[ok]]
        if Q:
            idx = t - s * np.arange(1, Q + 1)
            ok = idx >= 0
            if ok.any():
                acc += eta[ok] @ eps_ext[idx[ok]]
        w_ext[t] = acc
    restored = invert_difference(w_ext, ctx)
    return restored[-horizon:]


def rolling_test_rmse(fitted: SarimaFit, train, test) -> float:
    """One-step rolling-origin RMSE over ``test`` with frozen parameters.

    Each forecast conditions on the true history up to that day (train plus
    the already-revealed test prefix), never on earlier forecasts.
    """
    train = np.asarray(train, dtype=np.float64)
    test = np.asarray(test, dtype=np.float64)
    if len(test) == 0:
        raise ValueError("test segment is empty")
    history = list(train)
    errors = np.empty(len(test))
    for i, actual in enumerate(test):
        pred = forecast(fitted, np.asarray(history), 1)[0]
        errors[i] = pred - actual
        history.append(actual)
    return float(np.sqrt(np.mean(errors ** 2)))


@dataclass(frozen=True)
class GridSpec:
    """Candidate values for each order, plus the selection rule."""

    p: tuple = (0, 1)
    d: tuple = (0,)
    q: tuple = (0, 1)
    P: tuple = (0,)
    D: tuple = (0,)
    Q: tuple = (0,)
    s: tuple = (0,)
    selection: str = "holdout_rmse"

    def __post_init__(self):
        for name in ("p", "d", "q", "P", "D", "Q", "s"):
            vals = tuple(int(v) for v in getattr(self, name))
            if not vals:
                raise ValueError(f"grid range for {name} is empty")
            object.__setattr__(self, name, vals)
        if self.selection not in ("holdout_rmse", "aic"):
            raise ValueError(f"unknown selection rule {self.selection!r}")

    @classmethod
    def from_json(cls, text_or_obj, selection: str = "holdout_rmse") -> "GridSpec":
        """Parse a JSON grid.

        Each order maps either to a two-element inclusive interval
        (``"p": [0, 3]`` means 0,1,2,3) or to an explicit candidate set
        (``"s": {"values": [0, 7]}``).
        """
        obj = json.loads(text_or_obj) if isinstance(text_or_obj, str) else dict(text_or_obj)
        selection = obj.pop("selection", selection)
        fields = {}
        for name, val in obj.items():
            if name not in ("p", "d", "q", "P", "D", "Q", "s"):
                raise ValueError(f"unknown grid key {name!r}")
            if isinstance(val, dict):
                fields[name] = tuple(val["values"])
            elif isinstance(val, (list, tuple)) and len(val) == 2:
                lo, hi = int(val[0]), int(val[1])
                if hi < lo:
                    raise ValueError(f"grid interval for {name} is empty: {val}")
                fields[name] = tuple(range(lo, hi + 1))
            elif isinstance(val, int):
                fields[name] = (val,)
            else:
                raise ValueError(f"grid entry for {name} must be [lo, hi], an int, "
                                 f"or {{'values': [...]}}, got {val!r}")
        return cls(selection=selection, **fields)

    def candidates(self) -> list[SarimaSpec]:
        """Cartesian product in lexicographic (p,d,q,P,D,Q,s) order.

        Combinations with s < 2 have their seasonal orders collapsed to zero
        (there are no seasonal terms to order), then duplicates are dropped.
        """
        seen = set()
        out = []
        for p, d, q, P, D, Q, s in itertools.product(
                self.p, self.d, self.q, self.P, self.D, self.Q, self.s):
            if s < 2:
                P, D, Q, s = 0, 0, 0, 0
            key = (p, d, q, P, D, Q, s)
            if key in seen:
                continue
            seen.add(key)
            out.append(SarimaSpec(p=p, d=d, q=q, P=P, D=D, Q=Q, s=s))
        out.sort(key=lambda sp: sp.as_tuple())
        return out


@dataclass(frozen=True)
class CandidateScore:
    spec: SarimaSpec
    score: float | None
    error: str | None = None


@dataclass(frozen=True)
class GridSearchResult:
    spec: SarimaSpec
    fit: SarimaFit
    candidates: tuple  # CandidateScore per evaluated spec, search order


def grid_search(train, grid: GridSpec, validation_fraction: float = 0.2,
                seed: int = 0) -> GridSearchResult:
    """Evaluate every candidate spec and return the winner refit on all of
    ``train``.

    Under ``holdout_rmse`` each candidate is fitted on the earlier
    ``1 - validation_fraction`` share and scored by one-step rolling RMSE on
    the remainder; under ``aic`` it is fitted on the full series and scored
    by 2k + n*ln(sse/n).  Ties break toward fewer coefficients, then by
    lexicographic (p,d,q,P,D,Q,s) order.
    """
    train = np.asarray(train, dtype=np.float64)
    if not 0.0 < validation_fraction < 1.0:
        raise ValueError("validation_fraction must lie in (0, 1)")
    specs = grid.candidates()
    n_fit = int(np.floor((1.0 - validation_fraction) * len(train)))
    fit_part, val_part = train[:n_fit], train[n_fit:]

    scored = []
    diagnostics = []
    for spec in specs:
        try:
            if grid.selection == "holdout_rmse":
                if len(val_part) == 0:
                    raise ValueError("validation segment is empty")
                candidate_fit = fit(fit_part, spec, seed=seed)
                score = rolling_test_rmse(candidate_fit, fit_part, val_part)
            else:
                candidate_fit = fit(train, spec, seed=seed)
                k = 1 + spec.n_coefficients
                n_eval = len(candidate_fit.residuals)
                sse = max(candidate_fit.sse, 1e-300)  # guard ln(0) on exact fits
                score = 2.0 * k + n_eval * np.log(sse / n_eval)
            scored.append((score, spec.n_coefficients, spec.as_tuple(), spec))
            diagnostics.append(CandidateScore(spec=spec, score=float(score)))
        except ValueError as exc:
            diagnostics.append(CandidateScore(spec=spec, score=None, error=str(exc)))
    if not scored:
        raise GridSearchError("no grid candidate could be fitted", diagnostics)

    scored.sort(key=lambda item: item[:3])
    winner = scored[0][3]
    final = fit(train, winner, seed=seed)
    return GridSearchResult(spec=winner, fit=final, candidates=tuple(diagnostics))


def simulate(spec: SarimaSpec, params: SarimaParams, n: int, rng) -> np.ndarray:
    """Draw innovations and run the model forward from zero pre-sample state,
    then integrate away the differencing (also from zero initial values)."""
    params.check_lengths(spec)
    if n < 1:
        raise ValueError("n must be >= 1")
    alpha = np.asarray(params.alpha)
    theta = np.asarray(params.theta)
    phi = np.asarray(params.phi)
    eta = np.asarray(params.eta)
    p, q, P, Q, s = spec.p, spec.q, spec.P, spec.Q, spec.s
    eps = rng.normal(0.0, np.sqrt(params.sigma2), n) if params.sigma2 > 0 else np.zeros(n)
    w = np.zeros(n)
    for t in range(n):
        acc = params.c
        if p:
            window = w[max(0, t - p):t][::-1]
            acc += alpha[:len(window)] @ window
        if q:
            window = eps[max(0, t - q):t][::-1]
            acc += theta[:len(window)] @ window
        if P:
            idx = t - s * np.arange(1, P + 1)
            ok = idx >= 0
            if ok.any():
                acc += phi[ok] @ w[idx[ok]]
        if Q:
            idx = t - s * np.arange(1, Q + 1)
            ok = idx >= 0
            if ok.any():
                acc += eta[ok] @ eps[idx[ok]]
        w[t] = acc + eps[t]
    # integrate: seasonal passes first (they were applied last when differencing)
    for _ in range(spec.D):
        out = np.empty(n)
        for t in range(n):
            out[t] = w[t] + (out[t - s] if t >= s else 0.0)
        w = out
    for _ in range(spec.d):
        w = np.cumsum(w)
    return w


def to_json(spec: SarimaSpec, params: SarimaParams) -> str:
    return json.dumps({
        "order": list(spec.order),
        "seasonal": list(spec.seasonal_order),
        "c": params.c,
        "alpha": list(params.alpha),
        "theta": list(params.theta),
        "phi": list(params.phi),
        "eta": list(params.eta),
        "sigma2": params.sigma2,
    }, sort_keys=True)


def from_json(text: str) -> tuple[SarimaSpec, SarimaParams]:
    obj = json.loads(text)
    p, d, q = obj["order"]
    P, D, Q, s = obj["seasonal"]
    spec = SarimaSpec(p=p, d=d, q=q, P=P, D=D, Q=Q, s=s)
    params = SarimaParams(
        c=obj.get("c", 0.0),
        alpha=obj.get("alpha", ()),
        theta=obj.get("theta", ()),
        phi=obj.get("phi", ()),
        eta=obj.get("eta", ()),
        sigma2=obj.get("sigma2", 0.0),
    )
    params.check_lengths(spec)
    return spec, params
