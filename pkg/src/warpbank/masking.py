"""Time-frequency masks, mask costs, and mask estimators.

Masks are real gains in [0, 1] applied element-wise to noisy
coefficients. The oracle mask here is the truncated phase-sensitive
mask, the real gain minimizing the complex-plane squared error per bin.
Estimators implement :class:`MaskEstimator`; a noise-profile Wiener
gain stands in for a trained regression model.
"""

from __future__ import annotations

import abc
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, InvalidInputError
from .features import FeatureMatrix
from .signals import _readonly
from .stft import TfCoefficients


@dataclass(frozen=True, eq=False)
class Mask:
    """Per-channel real gains in [0, 1], one sequence per channel."""

    channels: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        if len(self.channels) < 1:
            raise InvalidInputError("mask needs at least one channel")
        frozen = []
        for ch in self.channels:
            arr = np.asarray(ch, dtype=np.float64)
            if arr.ndim != 1:
                raise InvalidInputError("each mask channel must be 1-D")
            if not np.all(np.isfinite(arr)):
                raise InvalidInputError("mask contains non-finite values")
            if arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
                raise InvalidInputError("mask values must lie in [0, 1]")
            frozen.append(_readonly(arr))
        object.__setattr__(self, "channels", tuple(frozen))

    @property
    def num_channels(self) -> int:
        return len(self.channels)

    @property
    def frame_counts(self) -> tuple[int, ...]:
        return tuple(ch.size for ch in self.channels)

    @classmethod
    def ones_like(cls, coeffs: TfCoefficients) -> "Mask":
        return cls(tuple(np.ones(ch.size) for ch in coeffs.channels))

    def matches(self, coeffs: TfCoefficients) -> bool:
        return self.frame_counts == coeffs.frame_counts


class MaskEstimator(abc.ABC):
    """Maps input features and noisy coefficients to a mask.

    Implementations must be pure (no mutation during ``estimate``) and
    must return a valid :class:`Mask` for any valid input. This is the
    seam where a trained regression model would plug in.
    """

    name = "estimator"

    @abc.abstractmethod
    def estimate(self, features: FeatureMatrix, noisy: TfCoefficients) -> Mask:
        ...


def truncate(z, a: float, b: float):
    """Clamp ``z`` (scalar or array) into [a, b]."""
    if a > b:
        raise ConfigurationError(f"empty truncation range: [{a}, {b}]")
    return np.clip(z, a, b)[()] if np.isscalar(z) else np.clip(z, a, b)


def _require_same_layout(a: TfCoefficients, b: TfCoefficients) -> None:
    if not a.same_layout(b):
        raise InvalidInputError("coefficient layouts do not match")


def psm_oracle(clean: TfCoefficients, noisy: TfCoefficients) -> Mask:
    """Truncated phase-sensitive mask computed from the clean reference.

    Per bin: ``clip(|S|/|X| * cos(phase(S) - phase(X)), 0, 1)``,
    evaluated as ``Re(S * conj(X)) / |X|^2``. Bins with ``X == 0`` get
    mask 0 (any gain there yields the same product).
    """
    _require_same_layout(clean, noisy)
    channels = []
    for s, x in zip(clean.channels, noisy.channels):
        power = x.real**2 + x.imag**2
        raw = np.zeros(x.size)
        nonzero = power > 0.0
        raw[nonzero] = (s[nonzero] * np.conj(x[nonzero])).real / power[nonzero]
        channels.append(np.clip(raw, 0.0, 1.0))
    return Mask(tuple(channels))


def apply_mask(mask: Mask, noisy: TfCoefficients) -> TfCoefficients:
    """Element-wise product; a real non-negative gain keeps bin phases."""
    if not mask.matches(noisy):
        raise InvalidInputError("mask layout does not match the coefficients")
    return noisy.replace_channels(
        [g * x for g, x in zip(mask.channels, noisy.channels)]
    )


def cost_mse(
    mask: Mask,
    noisy: TfCoefficients,
    clean: TfCoefficients,
    average: bool = False,
) -> float:
    """Squared complex-plane error of the masked coefficients.

    Summed over all bins as written; ``average=True`` divides by the
    bin count for comparability across layouts of different sizes.
    """
    _require_same_layout(clean, noisy)
    if not mask.matches(noisy):
        raise InvalidInputError("mask layout does not match the coefficients")
    total = 0.0
    bins = 0
    for g, x, s in zip(mask.channels, noisy.channels, clean.channels):
        diff = g * x - s
        total += float(np.sum(diff.real**2 + diff.imag**2))
        bins += x.size
    return total / bins if average else total


def cost_weighted_mse(
    mask: Mask,
    noisy: TfCoefficients,
    clean: TfCoefficients,
    weights,
    average: bool = False,
) -> float:
    """Per-channel weighted variant of :func:`cost_mse`.

    ``weights`` is a :class:`~warpbank.design.FrequencyWeights` or a
    plain sequence with one positive weight per channel.
    """
    _require_same_layout(clean, noisy)
    if not mask.matches(noisy):
        raise InvalidInputError("mask layout does not match the coefficients")
    w = np.asarray(getattr(weights, "weights", weights), dtype=np.float64)
    if w.shape != (noisy.num_channels,):
        raise InvalidInputError(
            f"need {noisy.num_channels} weights, got {w.shape}"
        )
    total = 0.0
    bins = 0
    for wv, g, x, s in zip(w, mask.channels, noisy.channels, clean.channels):
        diff = wv * (g * x - s)
        total += float(np.sum(diff.real**2 + diff.imag**2))
        bins += x.size
    return total / bins if average else total


class OnesEstimator(MaskEstimator):
    """Identity mask; useful as a perfect-reconstruction probe."""

    name = "ones"

    def estimate(self, features: FeatureMatrix, noisy: TfCoefficients) -> Mask:
        return Mask.ones_like(noisy)


class WienerEstimator(MaskEstimator):
    """Wiener-style gain from a leading noise-only profile.

    Estimates per-channel noise power from the first
    ``noise_profile_frames`` frames of the noisy coefficients and gates
    each bin by ``clip(1 - noise_power / |X|^2, 0, 1)``.
    """

    name = "wiener"

    def __init__(self, noise_profile_frames: int):
        if noise_profile_frames < 1:
            raise ConfigurationError("noise_profile_frames must be >= 1")
        self.noise_profile_frames = int(noise_profile_frames)

    def estimate(self, features: FeatureMatrix, noisy: TfCoefficients) -> Mask:
        n = self.noise_profile_frames
        channels = []
        for x in noisy.channels:
            if x.size < n:
                raise InvalidInputError(
                    f"channel has {x.size} frames, noise profile needs {n}"
                )
            power = np.maximum(x.real**2 + x.imag**2, 1e-12)
            noise_power = float(np.mean(power[:n]))
            channels.append(np.clip(1.0 - noise_power / power, 0.0, 1.0))
        return Mask(tuple(channels))


def wiener_baseline_estimator(noise_profile_frames: int) -> MaskEstimator:
    """Factory for the statistical baseline estimator."""
    return WienerEstimator(noise_profile_frames)
