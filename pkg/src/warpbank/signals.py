"""Sampled signals composed with complex spectra.

Holds the foundational immutable types (:class:`TimeSignal`,
:class:`Spectrum`), the unitary DFT pair, window generation, and SNR
mixing arithmetic. Everything here is a pure function of its inputs and
runs in 64-bit floating point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, InvalidInputError


def _readonly(arr: np.ndarray) -> np.ndarray:
    """Return a C-contiguous copy flagged read-only, safe to share."""
    out = np.ascontiguousarray(arr)
    if out is arr:
        out = arr.copy()
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class TimeSignal:
    """A real-valued sampled waveform.

    Parameters
    ----------
    samples : array_like of float
        At least one sample; every value must be finite.
    sample_rate : int
        Sampling rate in Hz, strictly positive.
    """

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1 or samples.size < 1:
            raise InvalidInputError("signal must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(samples)):
            raise InvalidInputError("signal contains non-finite samples")
        if int(self.sample_rate) <= 0:
            raise InvalidInputError("sample_rate must be positive")
        object.__setattr__(self, "samples", _readonly(samples))
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration(self) -> float:
        """Length in seconds."""
        return self.samples.size / self.sample_rate

    @property
    def energy(self) -> float:
        """Sum of squared samples."""
        return float(np.sum(self.samples**2))

    @property
    def power(self) -> float:
        """Mean squared sample value."""
        return self.energy / self.samples.size


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Two-sided complex spectrum of a sampled signal.

    ``resolution`` is the bin spacing in Hz. A spectrum of a real signal
    satisfies conjugate symmetry, checkable via
    :meth:`is_conjugate_symmetric`.
    """

    bins: np.ndarray
    resolution: float

    def __post_init__(self) -> None:
        bins = np.asarray(self.bins, dtype=np.complex128)
        if bins.ndim != 1 or bins.size < 1:
            raise InvalidInputError("spectrum must be a non-empty 1-D sequence")
        object.__setattr__(self, "bins", _readonly(bins))
        object.__setattr__(self, "resolution", float(self.resolution))

    def __len__(self) -> int:
        return self.bins.size

    @property
    def energy(self) -> float:
        return float(np.sum(np.abs(self.bins) ** 2))

    def is_conjugate_symmetric(self, tol: float = 1e-12) -> bool:
        """True when bin[L-i] == conj(bin[i]) for 1 <= i < L/2 within tol."""
        b = self.bins
        scale = float(np.max(np.abs(b))) or 1.0
        mirrored = np.conj(b[1:][::-1])
        return bool(np.max(np.abs(b[1:] - mirrored)) <= tol * scale)


def hann_periodic(length: int) -> np.ndarray:
    """Periodic Hann window, ``0.5 * (1 - cos(2 pi n / length))``."""
    if length < 1:
        raise InvalidInputError("window length must be >= 1")
    n = np.arange(length)
    return 0.5 * (1.0 - np.cos(2.0 * np.pi * n / length))


def dft_forward(signal: TimeSignal) -> Spectrum:
    """Unitary discrete Fourier transform of a signal.

    Uses 1/sqrt(L) normalization in both directions so that signal and
    spectrum energies coincide (Parseval).
    """
    x = signal.samples
    bins = np.fft.fft(x) / np.sqrt(x.size)
    return Spectrum(bins=bins, resolution=signal.sample_rate / x.size)


def dft_inverse(spectrum: Spectrum, sample_rate: int | None = None) -> TimeSignal:
    """Invert :func:`dft_forward`, discarding residual imaginary parts.

    ``sample_rate`` defaults to the rate implied by the spectrum
    resolution and length.
    """
    bins = spectrum.bins
    x = np.fft.ifft(bins) * np.sqrt(bins.size)
    if sample_rate is None:
        sample_rate = int(round(spectrum.resolution * bins.size))
    return TimeSignal(samples=x.real, sample_rate=sample_rate)


def measured_snr_db(clean: TimeSignal, noise: TimeSignal) -> float:
    """10 log10 of the clean/noise power ratio."""
    if clean.energy == 0.0 or noise.energy == 0.0:
        raise DegenerateInputError("SNR undefined for zero-energy signals")
    return 10.0 * np.log10(clean.energy / noise.energy)


def mix_at_snr(
    clean: TimeSignal, noise: TimeSignal, snr_db: float
) -> tuple[TimeSignal, TimeSignal]:
    """Scale ``noise`` so the clean/noise power ratio is exactly ``snr_db``
    and add it to ``clean``.

    Returns
    -------
    (mixture, scaled_noise)
        ``mixture.samples == clean.samples + scaled_noise.samples``.
    """
    if len(clean) != len(noise):
        raise InvalidInputError(
            f"length mismatch: clean has {len(clean)} samples, noise {len(noise)}"
        )
    if clean.sample_rate != noise.sample_rate:
        raise InvalidInputError("sample rates differ")
    if clean.energy == 0.0:
        raise DegenerateInputError("clean signal has zero energy")
    if noise.energy == 0.0:
        raise DegenerateInputError("noise signal has zero energy")
    scale = np.sqrt(clean.energy / (noise.energy * 10.0 ** (snr_db / 10.0)))
    scaled = TimeSignal(noise.samples * scale, noise.sample_rate)
    mixture = TimeSignal(clean.samples + scaled.samples, clean.sample_rate)
    return mixture, scaled
