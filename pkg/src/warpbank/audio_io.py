"""Mono RIFF/WAV reading and writing (16-bit PCM and 32-bit float)."""

from __future__ import annotations

import numpy as np
from scipy.io import wavfile

from .errors import InvalidInputError
from .signals import TimeSignal


def read_wav(path) -> TimeSignal:
    """Load a mono WAV file, rescaling integer PCM into [-1, 1]."""
    rate, data = wavfile.read(path)
    if data.ndim != 1:
        raise InvalidInputError(f"{path}: only mono files are supported")
    if data.dtype == np.int16:
        samples = data.astype(np.float64) / 32768.0
    elif data.dtype in (np.float32, np.float64):
        samples = data.astype(np.float64)
    else:
        raise InvalidInputError(
            f"{path}: unsupported sample format {data.dtype}; "
            "use 16-bit PCM or 32-bit float"
        )
    return TimeSignal(samples=samples, sample_rate=int(rate))


def write_wav(path, signal: TimeSignal, encoding: str = "float32") -> None:
    """Write a mono WAV file as 32-bit float or 16-bit PCM."""
    if encoding == "float32":
        wavfile.write(path, signal.sample_rate, signal.samples.astype(np.float32))
    elif encoding == "pcm16":
        scaled = np.clip(np.round(signal.samples * 32768.0), -32768, 32767)
        wavfile.write(path, signal.sample_rate, scaled.astype(np.int16))
    else:
        raise InvalidInputError(f"unknown encoding: {encoding!r}")
