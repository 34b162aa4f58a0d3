"""Optimization loop, windowed dataset iteration, and the finite-difference
gradient-check harness.

Everything is seed-deterministic: mini-batch shuffling derives a fresh
generator per epoch from the run seed, dropout draws from a dedicated stream,
and (seed, data, config) fully determine the trained parameters.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .autodiff import Parameter, Tensor
from .errors import ContractError, EmptyDatasetError, NanLossError
from .model import ModelConfig, ModelParams, forward

Array = np.ndarray


@dataclass
class TrainConfig:
    learning_rate: float = 1e-3
    betas: tuple[float, float] = (0.9, 0.999)
    adam_eps: float = 1e-8
    epochs: int = 10
    batch_size: int = 32
    patience: int = 3
    seed: int = 0
    clip_norm: float | None = None
    cosine_decay: bool = False

    def __post_init__(self) -> None:
        if self.learning_rate <= 0:
            raise ContractError(f"TrainConfig: learning_rate must be > 0, got {self.learning_rate}")
        if not (0.0 <= self.betas[0] < 1.0 and 0.0 <= self.betas[1] < 1.0):
            raise ContractError(f"TrainConfig: betas must be in [0, 1), got {self.betas}")
        if self.batch_size < 1:
            raise ContractError(f"TrainConfig: batch_size must be >= 1, got {self.batch_size}")


@dataclass
class WindowSample:
    """One contiguous (look-back, horizon) pair; ``y`` starts exactly at
    ``origin_index + len(x)``."""

    x: Array
    y: Array
    origin_index: int


def make_windows(series, lookback: int, horizon: int, stride: int = 1) -> list[WindowSample]:
    """Slide a (lookback, horizon) window over a (T, V) series.

    Origins are 0, stride, 2*stride, ... while origin + lookback + horizon
    <= T, giving floor((T - lookback - horizon) / stride) + 1 samples.
    """
    values = np.asarray(getattr(series, "values", series), dtype=np.float64)
    if values.ndim == 1:
        values = values[:, None]
    if stride < 1:
        raise ContractError(f"make_windows: stride must be >= 1, got {stride}")
    total = values.shape[0]
    if total < lookback + horizon:
        raise EmptyDatasetError(
            f"make_windows: series of length {total} cannot fit lookback {lookback} + horizon {horizon}"
        )
    samples = []
    for origin in range(0, total - lookback - horizon + 1, stride):
        samples.append(
            WindowSample(
                x=values[origin : origin + lookback],
                y=values[origin + lookback : origin + lookback + horizon],
                origin_index=origin,
            )
        )
    return samples


def stack_windows(samples: Sequence[WindowSample]) -> tuple[Array, Array]:
    return np.stack([s.x for s in samples]), np.stack([s.y for s in samples])


def mse_loss(pred: Tensor, target: Tensor | Array) -> Tensor:
    target = target if isinstance(target, Tensor) else Tensor(target)
    if pred.shape != target.shape:
        raise ContractError(f"mse_loss: shape mismatch {pred.shape} vs {target.shape}")
    diff = pred - target
    return (diff * diff).mean()


# -- Adam -------------------------------------------------------------------------


@dataclass
class AdamState:
    m: list[Array]
    v: list[Array]
    step: int = 0

    @classmethod
    def for_params(cls, params: Sequence[Parameter]) -> "AdamState":
        return cls(m=[np.zeros_like(p.data) for p in params], v=[np.zeros_like(p.data) for p in params])


def adam_step(
    params: Sequence[Parameter],
    state: AdamState,
    cfg: TrainConfig,
    lr: float | None = None,
) -> None:
    """Standard bias-corrected Adam update with optional global-norm clipping.

    Parameters with no accumulated gradient are treated as zero-gradient.
    """
    lr = cfg.learning_rate if lr is None else lr
    beta1, beta2 = cfg.betas
    grads = [p.grad if p.grad is not None else np.zeros_like(p.data) for p in params]
    if cfg.clip_norm is not None:
        total = math.sqrt(sum(float((g * g).sum()) for g in grads))
        if total > cfg.clip_norm:
            factor = cfg.clip_norm / (total + 1e-12)
            grads = [g * factor for g in grads]
    state.step += 1
    correct1 = 1.0 - beta1**state.step
    correct2 = 1.0 - beta2**state.step
    for p, g, m, v in zip(params, grads, state.m, state.v):
        m *= beta1
        m += (1.0 - beta1) * g
        v *= beta2
        v += (1.0 - beta2) * g * g
        p.data -= lr * (m / correct1) / (np.sqrt(v / correct2) + cfg.adam_eps)


# -- evaluation helpers ---------------------------------------------------------------


def predict_windows(
    params: ModelParams,
    cfg: ModelConfig,
    samples: Sequence[WindowSample],
    batch_size: int = 64,
) -> tuple[Array, Array]:
    """Eval-mode predictions over every sample; the final partial batch is
    always evaluated, never dropped."""
    preds, targets = [], []
    for start in range(0, len(samples), batch_size):
        chunk = samples[start : start + batch_size]
        x, y = stack_windows(chunk)
        preds.append(forward(Tensor(x), params, cfg, training=False).data)
        targets.append(y)
    return np.concatenate(preds), np.concatenate(targets)


def evaluate_mse(
    params: ModelParams,
    cfg: ModelConfig,
    samples: Sequence[WindowSample],
    batch_size: int = 64,
) -> float:
    preds, targets = predict_windows(params, cfg, samples, batch_size)
    return float(np.mean((preds - targets) ** 2))


# -- training loop ----------------------------------------------------------------------


@dataclass
class EpochStats:
    epoch: int
    train_mse: float
    val_mse: float
    seconds: float


@dataclass
class TrainResult:
    history: list[EpochStats]
    best_val_mse: float
    best_epoch: int
    stopped_early: bool

    @property
    def epochs_run(self) -> int:
        return len(self.history)


def train(
    params: ModelParams,
    model_cfg: ModelConfig,
    train_set: Sequence[WindowSample],
    val_set: Sequence[WindowSample],
    cfg: TrainConfig,
) -> TrainResult:
    """Epoch loop with seeded shuffling, eval-mode validation, early stopping
    after ``patience`` non-improving epochs, and best-checkpoint restore.

    Raises:
        NanLossError: naming the epoch and batch index if the loss goes NaN.
    """
    if not train_set or not val_set:
        raise EmptyDatasetError("train: train and validation sets must be non-empty")
    learnables = params.named_parameters()
    state = AdamState.for_params(learnables)
    dropout_rng = np.random.default_rng(np.random.SeedSequence(entropy=cfg.seed, spawn_key=(1,)))
    total_steps = max(1, cfg.epochs * ((len(train_set) + cfg.batch_size - 1) // cfg.batch_size))

    history: list[EpochStats] = []
    best_val = math.inf
    best_epoch = -1
    best_state: dict[str, Array] | None = None
    bad_epochs = 0
    stopped_early = False

    for epoch in range(cfg.epochs):
        started = time.perf_counter()
        shuffle_rng = np.random.default_rng(np.random.SeedSequence(entropy=cfg.seed, spawn_key=(100, epoch)))
        order = shuffle_rng.permutation(len(train_set))
        sq_error_sum = 0.0
        element_count = 0
        for batch_index, start in enumerate(range(0, len(order), cfg.batch_size)):
            chunk = [train_set[i] for i in order[start : start + cfg.batch_size]]
            x, y = stack_windows(chunk)
            pred = forward(Tensor(x), params, model_cfg, training=True, rng=dropout_rng)
            loss = mse_loss(pred, y)
            loss_value = loss.item()
            if not math.isfinite(loss_value):
                raise NanLossError(
                    f"train: non-finite loss at epoch {epoch}, batch {batch_index}"
                )
            for p in learnables:
                p.zero_grad()
            loss.backward()
            if cfg.cosine_decay:
                progress = state.step / total_steps
                lr = cfg.learning_rate * 0.5 * (1.0 + math.cos(math.pi * min(1.0, progress)))
            else:
                lr = cfg.learning_rate
            adam_step(learnables, state, cfg, lr=lr)
            sq_error_sum += loss_value * y.size
            element_count += y.size
        train_mse = sq_error_sum / element_count
        val_mse = evaluate_mse(params, model_cfg, val_set, batch_size=cfg.batch_size)
        history.append(
            EpochStats(
                epoch=epoch,
                train_mse=train_mse,
                val_mse=val_mse,
                seconds=time.perf_counter() - started,
            )
        )
        if val_mse < best_val:
            best_val = val_mse
            best_epoch = epoch
            best_state = {p.name: p.data.copy() for p in learnables}
            bad_epochs = 0
        else:
            bad_epochs += 1
            if bad_epochs > cfg.patience:
                stopped_early = True
                break
    if best_state is not None:
        for p in learnables:
            p.data[...] = best_state[p.name]
    return TrainResult(
        history=history,
        best_val_mse=best_val,
        best_epoch=best_epoch,
        stopped_early=stopped_early,
    )


# -- gradient checking --------------------------------------------------------------------


@dataclass
class CoordinateError:
    param: str
    index: int
    analytic: float
    numeric: float
    rel_error: float


@dataclass
class GradCheckReport:
    max_rel_error: float
    mean_rel_error: float
    worst: CoordinateError | None
    failures: list[CoordinateError]
    checked: int
    tolerance: float

    @property
    def passed(self) -> bool:
        return not self.failures


def gradient_check(
    loss_fn: Callable[[], Tensor],
    params: Sequence[Parameter],
    h: float = 1e-5,
    tolerance: float = 1e-4,
    max_coords: int = 10_000,
    seed: int = 0,
    _corrupt: str | None = None,
) -> GradCheckReport:
    """Compare analytic gradients of ``loss_fn`` against central finite
    differences on every parameter coordinate.

    ``loss_fn`` must be deterministic (evaluate the model in eval mode).
    Above ``max_coords`` total coordinates a seeded random subsample is
    checked instead. ``_corrupt`` is a test-only hook that injects an error
    into the named parameter's analytic gradient so harnesses can verify the
    check actually fails.
    """
    if h <= 0:
        raise ContractError(f"gradient_check: h must be > 0, got {h}")
    for p in params:
        p.zero_grad()
    loss_fn().backward()
    analytic = {p.name: (p.grad.copy() if p.grad is not None else np.zeros_like(p.data)) for p in params}
    if _corrupt is not None:
        analytic[_corrupt] = analytic[_corrupt] + 1.0

    coords = [(p, i) for p in params for i in range(p.size)]
    if len(coords) > max_coords:
        rng = np.random.default_rng(seed)
        picked = rng.choice(len(coords), size=max_coords, replace=False)
        coords = [coords[int(i)] for i in picked]

    failures: list[CoordinateError] = []
    worst: CoordinateError | None = None
    total_rel = 0.0
    for p, flat_index in coords:
        original = p.data.flat[flat_index]
        p.data.flat[flat_index] = original + h
        upper = loss_fn().item()
        p.data.flat[flat_index] = original - h
        lower = loss_fn().item()
        p.data.flat[flat_index] = original
        numeric = (upper - lower) / (2.0 * h)
        a = float(analytic[p.name].flat[flat_index])
        rel = abs(a - numeric) / max(abs(a), abs(numeric), 1e-6)
        total_rel += rel
        entry = CoordinateError(p.name, int(flat_index), a, numeric, rel)
        if worst is None or rel > worst.rel_error:
            worst = entry
        if rel > tolerance:
            failures.append(entry)
    return GradCheckReport(
        max_rel_error=worst.rel_error if worst else 0.0,
        mean_rel_error=total_rel / max(1, len(coords)),
        worst=worst,
        failures=failures,
        checked=len(coords),
        tolerance=tolerance,
    )
