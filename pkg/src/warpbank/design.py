"""Data-driven design of the frequency warping.

The pipeline: collect the oracle-mask residual over a dataset, re-render
it as a time signal, estimate its power spectral density by Welch
averaging, and integrate the (unit-mean, regularized) density into a
tabulated warping. Bands where the residual is strong come out narrow,
bands where it is weak come out wide, which evens the per-channel
residual variance. The same residuals also yield per-channel weights
(reciprocal residual spread) for the weighted cost.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInputError, InvalidInputError
from .masking import apply_mask, psm_oracle
from .signals import TimeSignal, _readonly
from .stft import StftParams, TfCoefficients
from .warping import TabulatedWarping

WEIGHT_CAP = 1e8


@dataclass(frozen=True, eq=False)
class ErrorPsd:
    """One-sided PSD of the masking residual.

    ``normalization`` documents the scale convention; see
    :func:`welch_psd`.
    """

    sigma: np.ndarray
    bin_hz: float
    num_segments: int
    normalization: str

    def __post_init__(self) -> None:
        sigma = np.asarray(self.sigma, dtype=np.float64)
        if sigma.ndim != 1 or sigma.size < 2:
            raise InvalidInputError("PSD must be a 1-D sequence of >= 2 bins")
        if not np.all(np.isfinite(sigma)) or np.any(sigma < 0.0):
            raise InvalidInputError("PSD values must be finite and >= 0")
        object.__setattr__(self, "sigma", _readonly(sigma))

    @property
    def frequencies(self) -> np.ndarray:
        return np.arange(self.sigma.size) * self.bin_hz

    @property
    def total_power(self) -> float:
        return float(np.sum(self.sigma) * self.bin_hz)


@dataclass(frozen=True, eq=False)
class FrequencyWeights:
    """Positive per-channel weights for the weighted cost."""

    weights: np.ndarray

    def __post_init__(self) -> None:
        weights = np.asarray(self.weights, dtype=np.float64)
        if weights.ndim != 1 or weights.size < 1:
            raise InvalidInputError("weights must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(weights)) or np.any(weights <= 0.0):
            raise InvalidInputError("weights must be finite and > 0")
        object.__setattr__(self, "weights", _readonly(weights))

    def __len__(self) -> int:
        return self.weights.size


@dataclass(frozen=True)
class WelchSettings:
    segment_length: int = 512
    overlap: float = 0.5
    window: str = "hann"

    def __post_init__(self) -> None:
        if self.segment_length < 2:
            raise InvalidInputError("segment_length must be >= 2")
        if not 0.0 <= self.overlap < 1.0:
            raise InvalidInputError("overlap must be in [0, 1)")
        if self.window not in ("hann", "hamming", "rectangular"):
            raise InvalidInputError(f"unknown window kind: {self.window!r}")


@dataclass(frozen=True)
class DesignConfig:
    """Everything the warping designer needs beside the dataset."""

    regularization: float = 0.1
    stft_params: StftParams = field(default_factory=StftParams.hann)
    welch: WelchSettings = field(default_factory=WelchSettings)
    num_channels: int = 64

    def __post_init__(self) -> None:
        if not (self.regularization >= 0.0 and np.isfinite(self.regularization)):
            raise InvalidInputError("regularization must be finite and >= 0")
        if self.num_channels < 2:
            raise InvalidInputError("num_channels must be >= 2")


def oracle_error(clean: TfCoefficients, noisy: TfCoefficients) -> TfCoefficients:
    """Residual of oracle masking: ``psm(S, X) * X - S`` per bin."""
    if not clean.same_layout(noisy):
        raise InvalidInputError("coefficient layouts do not match")
    masked = apply_mask(psm_oracle(clean, noisy), noisy)
    return clean.replace_channels(
        [m - s for m, s in zip(masked.channels, clean.channels)]
    )


def _welch_window(kind: str, length: int) -> np.ndarray:
    n = np.arange(length)
    if kind == "hann":
        return 0.5 * (1.0 - np.cos(2.0 * np.pi * n / length))
    if kind == "hamming":
        return 0.54 - 0.46 * np.cos(2.0 * np.pi * n / length)
    return np.ones(length)


def welch_psd(error_signal: TimeSignal, cfg: DesignConfig) -> ErrorPsd:
    """Averaged modified periodogram of a time signal, one-sided.

    Every one-sided bin carries twice the two-sided density, so white
    noise of unit variance has a flat expected level of
    ``2 / sample_rate`` at every bin, and summing ``sigma * bin_hz``
    recovers the signal variance up to the doubled edge bins.
    """
    seg = cfg.welch.segment_length
    x = error_signal.samples
    if x.size < seg:
        raise InvalidInputError(
            f"signal of {x.size} samples is shorter than one {seg}-sample segment"
        )
    step = max(int(round(seg * (1.0 - cfg.welch.overlap))), 1)
    window = _welch_window(cfg.welch.window, seg)
    scale = 2.0 / (error_signal.sample_rate * np.sum(window**2))

    starts = range(0, x.size - seg + 1, step)
    acc = np.zeros(seg // 2 + 1)
    count = 0
    for start in starts:
        spectrum = np.fft.rfft(x[start : start + seg] * window)
        acc += spectrum.real**2 + spectrum.imag**2
        count += 1
    sigma = acc * (scale / count)

    return ErrorPsd(
        sigma=sigma,
        bin_hz=error_signal.sample_rate / seg,
        num_segments=count,
        normalization="one-sided density, all bins doubled; "
        "unit-variance white noise is flat at 2/sample_rate",
    )


def design_warping(
    sigma: ErrorPsd, regularization: float, num_channels: int
) -> TabulatedWarping:
    """Integrate the regularized residual density into a warping.

    The density is rescaled to unit mean so ``regularization`` acts as a
    dimensionless fraction of the average residual power, then
    accumulated from low to high frequency. The channel-count rescaling
    onto ``[0, num_channels]`` happens when a filterbank is built; the
    value is only recorded here.
    """
    if not (regularization >= 0.0 and np.isfinite(regularization)):
        raise InvalidInputError("regularization must be finite and >= 0")
    if num_channels < 2:
        raise InvalidInputError("num_channels must be >= 2")
    values = sigma.sigma
    mean = float(np.mean(values))
    normalized = values / mean if mean > 0.0 else values
    increments = normalized + regularization
    if np.any(increments <= 0.0):
        raise DegenerateInputError(
            "warping is degenerate: residual PSD vanishes and regularization is 0"
        )
    warped = np.cumsum(increments)
    breakpoints = np.column_stack([sigma.frequencies, warped])
    return TabulatedWarping(
        breakpoints=breakpoints,
        regularization=float(regularization),
        normalization={
            "sigma_scaling": "unit-mean",
            "designed_channels": int(num_channels),
            "num_segments": sigma.num_segments,
        },
    )


def _pooled_channels(errors: list[TfCoefficients]) -> list[np.ndarray]:
    if not errors:
        raise InvalidInputError("need at least one error matrix")
    first = errors[0]
    for other in errors[1:]:
        if not first.same_layout(other):
            raise InvalidInputError("error matrices must share one layout")
    return [
        np.concatenate([e.channels[w] for e in errors])
        for w in range(first.num_channels)
    ]


def compute_weights(errors: list[TfCoefficients]) -> FrequencyWeights:
    """Reciprocal standard deviation of the residual per channel.

    The spread is the complex standard deviation,
    ``sqrt(mean(|e|^2) - |mean(e)|^2)``, over all frames of all supplied
    matrices pooled. This keeps the weighted per-band cost contributions
    equal regardless of how the residual magnitudes are distributed; a
    reading that takes moments of ``|e|`` instead would make the
    contributions depend on the magnitude distribution's shape. Weights
    are capped at ``1e8`` so silent bands cannot blow the weighted cost
    up.
    """
    pooled = _pooled_channels(errors)
    weights = np.empty(len(pooled))
    for w, values in enumerate(pooled):
        variance = float(np.mean(np.abs(values) ** 2) - np.abs(np.mean(values)) ** 2)
        if variance <= 0.0:
            weights[w] = WEIGHT_CAP
        else:
            weights[w] = min(1.0 / np.sqrt(variance), WEIGHT_CAP)
    return FrequencyWeights(weights=weights)


def band_error_variance(errors: list[TfCoefficients]) -> np.ndarray:
    """Per-channel variance of the complex residual, frames pooled.

    Second central moment on the complex plane:
    ``mean(|e|^2) - |mean(e)|^2``.
    """
    pooled = _pooled_channels(errors)
    out = np.empty(len(pooled))
    for w, values in enumerate(pooled):
        out[w] = float(np.mean(np.abs(values) ** 2) - np.abs(np.mean(values)) ** 2)
    return out
