"""Acoustic feature extraction: log magnitudes and log-mel compression."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, InvalidInputError
from .signals import _readonly
from .stft import StftParams, TfCoefficients

# Magnitudes are floored here before the log so features stay finite.
LOG_FLOOR = 1e-10


@dataclass(frozen=True, eq=False)
class FeatureMatrix:
    """Real feature values, shape (feature_dim, frames)."""

    values: np.ndarray
    domain_tag: str

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise InvalidInputError("feature values must be 2-D")
        if not np.all(np.isfinite(values)):
            raise InvalidInputError("feature values must be finite")
        if self.domain_tag not in ("stft", "mel", "wfbf"):
            raise InvalidInputError(f"unknown domain tag: {self.domain_tag!r}")
        object.__setattr__(self, "values", _readonly(values))


def _aligned_magnitudes(coeffs: TfCoefficients) -> np.ndarray:
    """Channel magnitudes on a common frame grid.

    Uniform layouts stack directly. Multirate layouts are brought to the
    fastest channel's grid by nearest-frame hold, so each output frame
    repeats the channel frame closest in time.
    """
    counts = coeffs.frame_counts
    target = max(counts)
    rows = np.empty((coeffs.num_channels, target))
    for row, ch in enumerate(coeffs.channels):
        mags = np.abs(ch)
        if ch.size == target:
            rows[row] = mags
        else:
            idx = np.minimum(
                np.round(np.arange(target) * (ch.size / target)).astype(int),
                ch.size - 1,
            )
            rows[row] = mags[idx]
    return rows


def log_magnitude(coeffs: TfCoefficients) -> FeatureMatrix:
    """Element-wise ``ln(max(|coefficient|, floor))``.

    Multirate channels are aligned to the fastest frame rate first so
    the result is a rectangular matrix.
    """
    mags = _aligned_magnitudes(coeffs)
    tag = "stft" if isinstance(coeffs.layout, StftParams) else "wfbf"
    return FeatureMatrix(values=np.log(np.maximum(mags, LOG_FLOOR)), domain_tag=tag)


def _hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def _mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def _triangle_areas(f_lo: float, f_mid: float, f_hi: float, edges: np.ndarray) -> np.ndarray:
    """Area of a unit-peak triangle over each interval of ``edges``.

    Integrating instead of point-sampling guarantees narrow triangles
    still land weight on the bins they overlap.
    """

    def antiderivative(f: np.ndarray) -> np.ndarray:
        f = np.clip(f, f_lo, f_hi)
        up = (f - f_lo) ** 2 / (2.0 * (f_mid - f_lo)) if f_mid > f_lo else np.zeros_like(f)
        rise = np.where(f <= f_mid, up, (f_mid - f_lo) / 2.0)
        down_span = f_hi - f_mid
        down = np.where(
            f > f_mid,
            (down_span - (f_hi - np.maximum(f, f_mid)) ** 2 / down_span) / 2.0
            if down_span > 0
            else 0.0,
            0.0,
        )
        return rise + down

    cumulative = antiderivative(edges)
    return np.diff(cumulative)


@dataclass(frozen=True, eq=False)
class MelTransform:
    """Mel filter matrix with its Moore-Penrose pseudo-inverse."""

    matrix: np.ndarray
    pseudo_inverse: np.ndarray
    num_mel: int

    def __post_init__(self) -> None:
        matrix = np.asarray(self.matrix, dtype=np.float64)
        pinv = np.asarray(self.pseudo_inverse, dtype=np.float64)
        if matrix.shape != (self.num_mel, pinv.shape[0]):
            raise ConfigurationError("matrix and pseudo-inverse shapes disagree")
        if np.any(matrix < 0.0):
            raise ConfigurationError("mel rows must be non-negative")
        if np.any(matrix.sum(axis=1) <= 0.0):
            raise ConfigurationError("every mel row must carry positive weight")
        object.__setattr__(self, "matrix", _readonly(matrix))
        object.__setattr__(self, "pseudo_inverse", _readonly(pinv))

    @classmethod
    def create(cls, num_mel: int, num_stft_bins: int, sample_rate: int) -> "MelTransform":
        """Triangular mel bands over the one-sided STFT bin grid.

        Band corners are equally spaced on the mel axis between 0 Hz and
        Nyquist; each row holds the triangle's area over every bin's
        frequency interval, normalized to unit row sum.
        """
        if num_mel < 1 or num_stft_bins < 2:
            raise ConfigurationError("need num_mel >= 1 and num_stft_bins >= 2")
        nyquist = sample_rate / 2.0
        bin_hz = nyquist / (num_stft_bins - 1)
        corners = _mel_to_hz(np.linspace(0.0, float(_hz_to_mel(nyquist)), num_mel + 2))
        edges = np.clip(
            (np.arange(num_stft_bins + 1) - 0.5) * bin_hz, 0.0, nyquist
        )
        matrix = np.empty((num_mel, num_stft_bins))
        for m in range(num_mel):
            areas = _triangle_areas(corners[m], corners[m + 1], corners[m + 2], edges)
            matrix[m] = areas / areas.sum()
        return cls(
            matrix=matrix,
            pseudo_inverse=np.linalg.pinv(matrix),
            num_mel=num_mel,
        )


def mel_features(coeffs: TfCoefficients, mel: MelTransform) -> FeatureMatrix:
    """Log-mel features of uniform STFT coefficients."""
    if not isinstance(coeffs.layout, StftParams):
        raise ConfigurationError("mel features are defined on uniform STFT layouts")
    magnitudes = np.abs(coeffs.as_matrix())
    if magnitudes.shape[0] != mel.matrix.shape[1]:
        raise ConfigurationError(
            f"mel matrix expects {mel.matrix.shape[1]} bins, "
            f"coefficients have {magnitudes.shape[0]}"
        )
    compressed = mel.matrix @ magnitudes
    return FeatureMatrix(
        values=np.log(np.maximum(compressed, LOG_FLOOR)), domain_tag="mel"
    )
