"""Amplitude-spectrum analysis and salient-periodicity detection.

Detection is a stop-gradient computation: it reads raw float buffers and
returns plain Python values, so nothing here participates in the backward
graph. The transform is an authored iterative radix-2 FFT with a Bluestein
fallback for non-power-of-two lengths; tests validate it against a naive
O(n^2) DFT oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .autodiff import Tensor
from .errors import ContractError, NumericError

Array = np.ndarray


# -- FFT ------------------------------------------------------------------------


def _bit_reversal(n: int) -> Array:
    bits = n.bit_length() - 1
    rev = np.zeros(n, dtype=np.int64)
    for i in range(1, n):
        rev[i] = (rev[i >> 1] >> 1) | ((i & 1) << (bits - 1))
    return rev


def _fft_pow2(a: Array) -> Array:
    """Iterative radix-2 DIT FFT along the last axis (power-of-two length)."""
    n = a.shape[-1]
    out = np.ascontiguousarray(a[..., _bit_reversal(n)], dtype=np.complex128)
    span = 2
    while span <= n:
        half = span // 2
        twiddle = np.exp(-2j * np.pi * np.arange(half) / span)
        blocks = out.reshape(*out.shape[:-1], n // span, span)
        even = blocks[..., :half]
        odd = blocks[..., half:] * twiddle
        blocks[..., :half], blocks[..., half:] = even + odd, even - odd
        span *= 2
    return out


def _fft_bluestein(a: Array) -> Array:
    """Chirp-z DFT of arbitrary length via power-of-two convolutions."""
    n = a.shape[-1]
    k = np.arange(n, dtype=np.int64)
    # k^2 mod 2n keeps the chirp angle small for accurate trig evaluation
    angle = np.pi * ((k * k) % (2 * n)) / n
    chirp = np.exp(-1j * angle)
    m = 1 << (2 * n - 1).bit_length()
    padded = np.zeros(a.shape[:-1] + (m,), dtype=np.complex128)
    padded[..., :n] = a * chirp
    kernel = np.zeros(m, dtype=np.complex128)
    kernel[:n] = np.conj(chirp)
    kernel[m - n + 1 :] = np.conj(chirp[1:][::-1])
    conv = _ifft_pow2(_fft_pow2(padded) * _fft_pow2(kernel))
    return conv[..., :n] * chirp


def _ifft_pow2(a: Array) -> Array:
    return np.conj(_fft_pow2(np.conj(a))) / a.shape[-1]


def fft_last_axis(a: Array) -> Array:
    """Discrete Fourier transform along the last axis for any length >= 1."""
    a = np.asarray(a)
    n = a.shape[-1]
    if n < 1:
        raise ContractError("fft_last_axis: empty transform")
    if n == 1:
        return a.astype(np.complex128)
    if n & (n - 1) == 0:
        return _fft_pow2(a)
    return _fft_bluestein(a)


# -- amplitude spectrum ------------------------------------------------------------


@dataclass
class AmplitudeSpectrum:
    """DFT magnitudes averaged over examples and variates.

    ``amps[i]`` is the amplitude of frequency ``i + 1``; the DC bin is
    excluded, so the vector has length ``window_length // 2``.
    """

    amps: Array
    window_length: int

    def amplitude_for(self, frequency: int) -> float:
        return float(self.amps[frequency - 1])


@dataclass
class PeriodicitySet:
    """Detected salient periodicities of one block input.

    ``periods[i] == ceil(window_length / frequencies[i])``; periods are
    pairwise distinct, amplitudes non-increasing, and weights are the softmax
    of the retained amplitudes (positive, summing to 1).
    """

    frequencies: list[int]
    periods: list[int]
    amplitudes: list[float]
    weights: list[float]

    def __len__(self) -> int:
        return len(self.periods)

    def to_dict(self) -> dict:
        return {
            "frequencies": self.frequencies,
            "periods": self.periods,
            "amplitudes": self.amplitudes,
            "weights": self.weights,
        }


def amplitude_spectrum(x: Tensor | Array) -> AmplitudeSpectrum:
    """Per-variate, per-example DFT magnitude of a (B, I, V) batch, averaged
    over examples and variates, with the DC component dropped.

    A single example is the degenerate B=1 case of the same code path.
    """
    data = x.data if isinstance(x, Tensor) else np.asarray(x, dtype=np.float64)
    if data.ndim != 3:
        raise ContractError(f"amplitude_spectrum: expected (B, I, V) input, got shape {data.shape}")
    window = data.shape[1]
    if window < 2:
        raise ContractError(f"amplitude_spectrum: window length must be >= 2, got {window}")
    if not np.isfinite(data).all():
        raise NumericError("amplitude_spectrum: input contains non-finite values")
    series = np.transpose(data, (0, 2, 1)).reshape(-1, window)
    mags = np.abs(fft_last_axis(series)).mean(axis=0)
    return AmplitudeSpectrum(amps=mags[1 : window // 2 + 1], window_length=window)


def detect_salient_periods(spectrum: AmplitudeSpectrum, k: int) -> PeriodicitySet:
    """Pick the top-``k`` periods from the spectrum.

    Frequencies are scanned in decreasing amplitude order (ties broken toward
    the lower frequency), mapped to ``ceil(I / f)``, and frequencies whose
    period duplicates an already-selected one are skipped. Returns fewer than
    ``k`` entries only when the spectrum is exhausted; never pads.
    """
    if k < 1:
        raise ContractError(f"detect_salient_periods: k must be >= 1, got {k}")
    window = spectrum.window_length
    amps = spectrum.amps
    order = np.lexsort((np.arange(1, len(amps) + 1), -amps))
    frequencies: list[int] = []
    periods: list[int] = []
    amplitudes: list[float] = []
    seen: set[int] = set()
    for idx in order:
        freq = int(idx) + 1
        period = -(-window // freq)
        if period in seen:
            continue
        seen.add(period)
        frequencies.append(freq)
        periods.append(period)
        amplitudes.append(float(amps[idx]))
        if len(periods) == k:
            break
    weights = _softmax_weights(amplitudes)
    return PeriodicitySet(frequencies, periods, amplitudes, weights)


def _softmax_weights(amplitudes: list[float]) -> list[float]:
    a = np.asarray(amplitudes, dtype=np.float64)
    e = np.exp(a - a.max())
    return (e / e.sum()).tolist()


def sliding_amplitudes(values: Array, lookback: int, stride: int = 1) -> tuple[list[int], Array]:
    """Variate-averaged amplitude spectra of every length-``lookback`` window.

    Returns the window origins and an (num_windows, lookback // 2) matrix;
    row ``w`` is the spectrum of the window starting at ``origins[w]``. All
    windows are transformed in one vectorized FFT call.
    """
    values = np.asarray(values, dtype=np.float64)
    if values.ndim == 1:
        values = values[:, None]
    total = values.shape[0]
    if lookback < 2 or lookback > total:
        raise ContractError(f"sliding_amplitudes: lookback {lookback} invalid for series length {total}")
    if stride < 1:
        raise ContractError(f"sliding_amplitudes: stride must be >= 1, got {stride}")
    origins = list(range(0, total - lookback + 1, stride))
    windows = np.stack([values[o : o + lookback] for o in origins])  # (n, I, V)
    series = np.transpose(windows, (0, 2, 1)).reshape(-1, lookback)
    mags = np.abs(fft_last_axis(series)).reshape(len(origins), values.shape[1], lookback)
    averaged = mags.mean(axis=1)
    return origins, averaged[:, 1 : lookback // 2 + 1]
