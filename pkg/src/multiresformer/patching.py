"""Resolution-branch plumbing: pad, segment, differentiable resize, restore.

A branch turns a (B, I, V) series into non-overlapping patches of one
detected period, resamples each patch to the model width with endpoint-aligned
linear interpolation, and later inverts the whole pipeline. Resampling is a
multiplication by a cached constant weight matrix, so its adjoint is the
transposed scatter of the same weights and exact by construction.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np

from .autodiff import Tensor, concat, matmul, narrow, permute, reshape
from .errors import ContractError

Array = np.ndarray

_RESIZE_CACHE: dict[tuple[int, int], Array] = {}
_RESIZE_LOCK = threading.Lock()


@dataclass
class BranchGeometry:
    """Static geometry of one resolution branch."""

    period: int
    num_patches: int
    pad_len: int
    model_width: int

    @classmethod
    def for_series(cls, lookback: int, period: int, model_width: int) -> "BranchGeometry":
        if period < 1:
            raise ContractError(f"BranchGeometry: period must be >= 1, got {period}")
        num_patches = -(-lookback // period)
        return cls(
            period=period,
            num_patches=num_patches,
            pad_len=num_patches * period - lookback,
            model_width=model_width,
        )


def pad_to_multiple(x: Tensor, period: int) -> Tensor:
    """Extend the time axis to a multiple of ``period`` by repeating the last
    value of each variate; identity when it already divides."""
    if period < 1:
        raise ContractError(f"pad_to_multiple: period must be >= 1, got {period}")
    length = x.shape[1]
    pad_len = (-length) % period
    if pad_len == 0:
        return x
    last = narrow(x, 1, length - 1, 1)
    return concat([x] + [last] * pad_len, axis=1)


def segment(x: Tensor, period: int) -> Tensor:
    """Re-layout (B, L, V) into non-overlapping patches (B, V, NP, period).

    Pure permutation: stride equals patch length, no values change. The
    caller must pad first; a non-divisible length is a contract error.
    """
    batch, length, variates = x.shape
    if period < 1 or length % period != 0:
        raise ContractError(f"segment: period {period} does not divide length {length}")
    by_variate = permute(x, (0, 2, 1))
    return reshape(by_variate, (batch, variates, length // period, period))


def resize_weights(source: int, target: int) -> Array:
    """Constant (source, target) endpoint-aligned linear resampling matrix.

    Column ``j`` holds the convex weights of the sample at position
    ``j * (source - 1) / (target - 1)``; each column has at most two
    nonzeros. Matrices are cached and shared read-only.
    """
    if source < 1 or target < 1:
        raise ContractError(f"resize_weights: sizes must be >= 1, got ({source}, {target})")
    key = (source, target)
    cached = _RESIZE_CACHE.get(key)
    if cached is not None:
        return cached
    with _RESIZE_LOCK:
        cached = _RESIZE_CACHE.get(key)
        if cached is not None:
            return cached
        weights = np.zeros((source, target), dtype=np.float64)
        if source == 1:
            weights[0, :] = 1.0
        else:
            if target == 1:
                positions = np.array([(source - 1) / 2.0])
            else:
                positions = np.arange(target) * (source - 1) / (target - 1)
            lower = np.minimum(positions.astype(np.int64), source - 2)
            frac = positions - lower
            for j in range(target):
                weights[lower[j], j] += 1.0 - frac[j]
                weights[lower[j] + 1, j] += frac[j]
        _RESIZE_CACHE[key] = weights
        return weights


def resize_linear(patches: Tensor, target: int) -> Tensor:
    """Resample the last axis to ``target`` samples by endpoint-aligned linear
    interpolation; identity when the length already matches."""
    source = patches.shape[-1]
    if target == source:
        return patches
    return matmul(patches, Tensor(resize_weights(source, target)))


def flatten_truncate(patches: Tensor, original_len: int) -> Tensor:
    """Flatten (B, V, NP, p) back to (B, I, V) time order, dropping the
    trailing padded positions."""
    batch, variates, num_patches, patch_len = patches.shape
    total = num_patches * patch_len
    if total < original_len:
        raise ContractError(
            f"flatten_truncate: {num_patches}x{patch_len} patches cover {total} "
            f"steps < requested {original_len}"
        )
    flat = reshape(patches, (batch, variates, total))
    if total > original_len:
        flat = narrow(flat, 2, 0, original_len)
    return permute(flat, (0, 2, 1))
