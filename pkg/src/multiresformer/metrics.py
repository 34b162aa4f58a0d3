"""Forecast evaluation metrics and representation similarity.

MSE/MAE serve the long-horizon protocol; SMAPE/MASE/OWA follow the M4
competition definitions (the OWA reference values must be supplied by the
caller — only a plain seasonal-naive generator is provided here, not the
full Naive2 pipeline). Linear CKA compares representation matrices and is
invariant to orthogonal transforms and isotropic scaling.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, ShapeMismatchError, UndefinedMetricError

Array = np.ndarray


def _aligned(pred, target) -> tuple[Array, Array]:
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise ShapeMismatchError(f"metric: shape mismatch {pred.shape} vs {target.shape}")
    return pred, target


def mse(pred, target) -> float:
    pred, target = _aligned(pred, target)
    return float(np.mean((pred - target) ** 2))


def mae(pred, target) -> float:
    pred, target = _aligned(pred, target)
    return float(np.mean(np.abs(pred - target)))


def per_horizon_mse(pred, target) -> Array:
    """Per-forecast-step MSE vector for (..., O, V) or (O,) arrays; the
    horizon axis is the second-to-last for multivariate layouts."""
    pred, target = _aligned(pred, target)
    sq = (pred - target) ** 2
    if sq.ndim == 1:
        return sq
    horizon_axis = sq.ndim - 2
    reduce_axes = tuple(ax for ax in range(sq.ndim) if ax != horizon_axis)
    return sq.mean(axis=reduce_axes)


def smape(pred, target) -> float:
    """Symmetric MAPE in percent: mean of 200|y - yhat| / (|y| + |yhat|),
    with 0/0 terms defined as 0."""
    pred, target = _aligned(pred, target)
    numer = 200.0 * np.abs(target - pred)
    denom = np.abs(target) + np.abs(pred)
    terms = np.where(denom == 0.0, 0.0, numer / np.where(denom == 0.0, 1.0, denom))
    return float(terms.mean())


def mase(pred, target, insample, season: int) -> float:
    """MAE scaled by the in-sample seasonal-naive MAE at lag ``season``."""
    pred, target = _aligned(pred, target)
    insample = np.asarray(insample, dtype=np.float64).reshape(-1)
    if season < 1:
        raise ContractError(f"mase: season must be >= 1, got {season}")
    if insample.size <= season:
        raise ContractError(
            f"mase: in-sample length {insample.size} must exceed season {season}"
        )
    scale = float(np.mean(np.abs(insample[season:] - insample[:-season])))
    if scale == 0.0:
        raise UndefinedMetricError("mase: constant seasonal in-sample, zero denominator")
    return mae(pred, target) / scale


def owa(smape_value: float, mase_value: float, smape_naive2: float, mase_naive2: float) -> float:
    """Overall weighted average: mean of the SMAPE and MASE ratios against
    the Naive2 reference values."""
    if smape_naive2 <= 0 or mase_naive2 <= 0:
        raise ContractError(
            f"owa: reference values must be > 0, got ({smape_naive2}, {mase_naive2})"
        )
    return 0.5 * (smape_value / smape_naive2 + mase_value / mase_naive2)


def linear_cka(reps_a, reps_b) -> float:
    """Linear centered kernel alignment between (n, p) and (n, q)
    representation matrices, computed after column-centering both."""
    a = np.asarray(reps_a, dtype=np.float64)
    b = np.asarray(reps_b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2 or a.shape[0] != b.shape[0]:
        raise ShapeMismatchError(f"linear_cka: incompatible shapes {a.shape} vs {b.shape}")
    if a.shape[0] < 2:
        raise ContractError(f"linear_cka: need at least 2 rows, got {a.shape[0]}")
    a = a - a.mean(axis=0, keepdims=True)
    b = b - b.mean(axis=0, keepdims=True)
    cross = np.linalg.norm(a.T @ b, "fro") ** 2
    norm_a = np.linalg.norm(a.T @ a, "fro")
    norm_b = np.linalg.norm(b.T @ b, "fro")
    if norm_a == 0.0 or norm_b == 0.0:
        raise UndefinedMetricError("linear_cka: zero-variance representation")
    return float(cross / (norm_a * norm_b))


# -- naive forecasting baselines -------------------------------------------------------


def repeat_last_forecast(x: Array, horizon: int) -> Array:
    """Repeat each window's final observation across the horizon;
    x is (B, I, V)."""
    x = np.asarray(x, dtype=np.float64)
    return np.repeat(x[:, -1:, :], horizon, axis=1)


def seasonal_naive_forecast(x: Array, horizon: int, season: int) -> Array:
    """Repeat the value observed one season earlier: step j of the forecast
    copies the look-back value at lag season - (j mod season)."""
    x = np.asarray(x, dtype=np.float64)
    lookback = x.shape[1]
    if season < 1 or season > lookback:
        raise ContractError(f"seasonal_naive_forecast: season {season} invalid for lookback {lookback}")
    offsets = lookback - season + (np.arange(horizon) % season)
    return x[:, offsets, :]


# -- report bundle ----------------------------------------------------------------------


@dataclass
class MetricReport:
    mse: float
    mae: float
    smape: float | None = None
    mase: float | None = None
    owa: float | None = None
    per_horizon: list[float] | None = None

    def to_dict(self) -> dict:
        payload = {"mse": self.mse, "mae": self.mae}
        for name in ("smape", "mase", "owa"):
            value = getattr(self, name)
            if value is not None:
                payload[name] = value
        if self.per_horizon is not None:
            payload["per_horizon"] = self.per_horizon
        return payload

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)
