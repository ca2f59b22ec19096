"""Uniform short-time Fourier transform with exact inversion.

Analysis windows a padded copy of the signal on a regular hop grid and
keeps the non-negative-frequency bins. Synthesis inverts the frame by
dividing the overlap-added windowed frames by the diagonal frame
operator (the canonical dual), which reconstructs any signal exactly
wherever the window grid covers it.

:class:`TfCoefficients` is the coefficient container shared with the
warped filterbank: one complex sequence per channel, with per-channel
frame rates so uniform and multirate layouts look alike downstream.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import ConfigurationError, InvalidInputError, NonInvertibleFrameError
from .signals import TimeSignal, _readonly, hann_periodic

# Relative floor below which a frame-diagonal value counts as uncovered.
_COVERAGE_EPS = 1e-10


@dataclass(frozen=True, eq=False)
class StftParams:
    """Analysis/synthesis parameters for the uniform STFT.

    Parameters
    ----------
    window : array_like of float
        Analysis window, length >= 1.
    hop : int
        Time shift between frames in samples; ``1 <= hop <= len(window)``.
    fft_size : int
        DFT length, ``>= len(window)``. Frames are zero-padded up to it.
    """

    window: np.ndarray
    hop: int
    fft_size: int

    def __post_init__(self) -> None:
        window = np.asarray(self.window, dtype=np.float64)
        if window.ndim != 1 or window.size < 1:
            raise ConfigurationError("window must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(window)):
            raise ConfigurationError("window contains non-finite values")
        hop = int(self.hop)
        fft_size = int(self.fft_size)
        if hop < 1:
            raise ConfigurationError("hop must be >= 1")
        if hop > window.size:
            raise ConfigurationError("hop must not exceed the window length")
        if fft_size < window.size:
            raise ConfigurationError(
                f"window of length {window.size} does not fit fft_size {fft_size}"
            )
        # Periodized frame diagonal: sum of squared window translates on the
        # hop grid must be strictly positive for every residue.
        diag = np.zeros(hop)
        for start in range(0, window.size, hop):
            chunk = window[start : start + hop] ** 2
            diag[: chunk.size] += chunk
        if np.min(diag) <= 0.0:
            raise ConfigurationError(
                "window/hop pair leaves sample positions uncovered"
            )
        object.__setattr__(self, "window", _readonly(window))
        object.__setattr__(self, "hop", hop)
        object.__setattr__(self, "fft_size", fft_size)

    @property
    def num_bins(self) -> int:
        """Number of non-negative-frequency bins stored for real input."""
        return self.fft_size // 2 + 1

    @property
    def pad(self) -> int:
        """Symmetric zero-padding applied at both signal ends."""
        return self.window.size // 2

    @classmethod
    def hann(cls, window_length: int = 512, hop: int = 256, fft_size: int | None = None) -> "StftParams":
        """Periodic-Hann parameters; ``fft_size`` defaults to the window length."""
        return cls(
            window=hann_periodic(window_length),
            hop=hop,
            fft_size=window_length if fft_size is None else fft_size,
        )


@dataclass(frozen=True, eq=False)
class TfCoefficients:
    """Complex time-frequency coefficients, one sequence per channel.

    For the uniform STFT every channel has the same frame count; for the
    warped filterbank channel ``w`` has ``signal_length / decimation_w``
    frames. ``layout`` keeps a reference to the originating
    :class:`StftParams` or filterbank spec.
    """

    channels: tuple[np.ndarray, ...]
    channel_rates: tuple[float, ...]
    layout: Any
    signal_length: int

    def __post_init__(self) -> None:
        if len(self.channels) < 1:
            raise InvalidInputError("coefficients need at least one channel")
        if len(self.channel_rates) != len(self.channels):
            raise InvalidInputError("one frame rate per channel required")
        frozen = tuple(
            _readonly(np.asarray(ch, dtype=np.complex128)) for ch in self.channels
        )
        for ch in frozen:
            if ch.ndim != 1:
                raise InvalidInputError("each channel must be a 1-D sequence")
        object.__setattr__(self, "channels", frozen)
        object.__setattr__(self, "channel_rates", tuple(float(r) for r in self.channel_rates))
        object.__setattr__(self, "signal_length", int(self.signal_length))

    @property
    def num_channels(self) -> int:
        return len(self.channels)

    @property
    def frame_counts(self) -> tuple[int, ...]:
        return tuple(ch.size for ch in self.channels)

    @property
    def is_uniform(self) -> bool:
        counts = self.frame_counts
        return all(c == counts[0] for c in counts)

    def as_matrix(self) -> np.ndarray:
        """Channels stacked into a (channels x frames) matrix; uniform only."""
        if not self.is_uniform:
            raise InvalidInputError("channels have unequal frame counts")
        return np.stack(self.channels)

    def same_layout(self, other: "TfCoefficients") -> bool:
        return (
            self.num_channels == other.num_channels
            and self.frame_counts == other.frame_counts
            and self.signal_length == other.signal_length
        )

    def replace_channels(self, channels: list[np.ndarray]) -> "TfCoefficients":
        """New container with identical layout metadata and new values."""
        return TfCoefficients(
            channels=tuple(channels),
            channel_rates=self.channel_rates,
            layout=self.layout,
            signal_length=self.signal_length,
        )


def _frame_starts(signal_length: int, params: StftParams) -> int:
    """Number of analysis frames: ceil(signal_length / hop)."""
    return -(-signal_length // params.hop)


def stft_analyze(signal: TimeSignal, params: StftParams) -> TfCoefficients:
    """Windowed DFT analysis on a regular hop grid.

    The signal is zero-padded by half a window length at both ends;
    frame ``k`` covers padded samples ``[k*hop, k*hop + len(window))``.
    Output has ``fft_size//2 + 1`` channels and ``ceil(len/hop)`` frames.
    """
    win = params.window
    hop = params.hop
    n_frames = _frame_starts(len(signal), params)
    pad = params.pad
    needed = (n_frames - 1) * hop + win.size
    padded = np.zeros(max(needed, len(signal) + 2 * pad))
    padded[pad : pad + len(signal)] = signal.samples

    frames = np.lib.stride_tricks.sliding_window_view(padded, win.size)[::hop][:n_frames]
    spectra = np.fft.rfft(frames * win, n=params.fft_size, axis=1)

    rate = signal.sample_rate / hop
    return TfCoefficients(
        channels=tuple(np.ascontiguousarray(col) for col in spectra.T),
        channel_rates=(rate,) * params.num_bins,
        layout=params,
        signal_length=len(signal),
    )


def stft_synthesize(coeffs: TfCoefficients, params: StftParams, length: int) -> TimeSignal:
    """Invert :func:`stft_analyze` through the canonical dual.

    Overlap-adds the windowed inverse DFT of every frame, then divides by
    the diagonal frame operator ``sum_k window[l - k*hop]**2``. For
    unmodified coefficients this reproduces the analyzed signal exactly
    (up to rounding) over the ``length`` retained samples.
    """
    if coeffs.num_channels != params.num_bins:
        raise InvalidInputError(
            f"coefficients have {coeffs.num_channels} channels, "
            f"params imply {params.num_bins}"
        )
    if not coeffs.is_uniform:
        raise InvalidInputError("uniform frame counts required for STFT synthesis")

    matrix = coeffs.as_matrix()  # (bins, frames)
    win = params.window
    hop = params.hop
    n_frames = matrix.shape[1]
    pad = params.pad

    frames_time = np.fft.irfft(matrix.T, n=params.fft_size, axis=1)[:, : win.size]
    frames_time *= win

    total = (n_frames - 1) * hop + win.size
    acc = np.zeros(total)
    diag = np.zeros(total)
    win_sq = win**2
    for k in range(n_frames):
        sl = slice(k * hop, k * hop + win.size)
        acc[sl] += frames_time[k]
        diag[sl] += win_sq

    if pad + length > total:
        raise NonInvertibleFrameError(
            f"frames cover {total} samples, cannot reconstruct {length} "
            f"starting at offset {pad}"
        )
    keep_diag = diag[pad : pad + length]
    if np.min(keep_diag) <= _COVERAGE_EPS * np.max(diag):
        raise NonInvertibleFrameError("some samples are uncovered by the window grid")

    samples = acc[pad : pad + length] / keep_diag
    rate = int(round(coeffs.channel_rates[0] * hop))
    return TimeSignal(samples=samples, sample_rate=rate)
