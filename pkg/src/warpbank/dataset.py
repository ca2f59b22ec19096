"""Dataset manifests and the synthetic fixture generator.

Manifests point at clean/noise WAV pairs with a target mixing SNR.
The fixture generator stands in for a speech corpus at desk scale: it
renders harmonic, formant-shaped, amplitude-modulated "voices" and
three noise families (white, pink, multi-voice babble), all
deterministically from a seed.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

from .audio_io import read_wav, write_wav
from .errors import InvalidInputError
from .signals import TimeSignal


@dataclass(frozen=True)
class ManifestEntry:
    clean_path: str
    noise_path: str
    snr_db: float
    seed: int


@dataclass(frozen=True)
class DatasetManifest:
    entries: tuple[ManifestEntry, ...]
    sample_rate: int

    def __post_init__(self) -> None:
        if len(self.entries) < 1:
            raise InvalidInputError("manifest needs at least one entry")
        object.__setattr__(self, "entries", tuple(self.entries))

    def __len__(self) -> int:
        return len(self.entries)

    def with_snr(self, snr_db: float) -> "DatasetManifest":
        """Same files, one common mixing SNR."""
        return DatasetManifest(
            entries=tuple(
                ManifestEntry(e.clean_path, e.noise_path, float(snr_db), e.seed)
                for e in self.entries
            ),
            sample_rate=self.sample_rate,
        )

    def save(self, path) -> None:
        base = os.path.dirname(os.path.abspath(path))
        payload = {
            "sample_rate": self.sample_rate,
            "entries": [
                {
                    "clean_path": os.path.relpath(e.clean_path, base),
                    "noise_path": os.path.relpath(e.noise_path, base),
                    "snr_db": e.snr_db,
                    "seed": e.seed,
                }
                for e in self.entries
            ],
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=1, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "DatasetManifest":
        """Read a manifest and verify every file exists at the stated rate."""
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
        base = os.path.dirname(os.path.abspath(path))
        rate = int(payload["sample_rate"])
        entries = []
        for raw in payload["entries"]:
            clean = os.path.normpath(os.path.join(base, raw["clean_path"]))
            noise = os.path.normpath(os.path.join(base, raw["noise_path"]))
            for p in (clean, noise):
                if not os.path.isfile(p):
                    raise InvalidInputError(f"manifest references missing file: {p}")
                found = read_wav(p).sample_rate
                if found != rate:
                    raise InvalidInputError(
                        f"{p}: sample rate {found} != manifest rate {rate}"
                    )
            entries.append(
                ManifestEntry(clean, noise, float(raw["snr_db"]), int(raw["seed"]))
            )
        return cls(entries=tuple(entries), sample_rate=rate)


def _voice(rng: np.random.Generator, num_samples: int, sample_rate: int) -> np.ndarray:
    """One harmonic voice: randomized pitch, formant envelope, syllabic AM."""
    t = np.arange(num_samples) / sample_rate
    f0 = rng.uniform(80.0, 300.0)
    formant_centers = np.array(
        [rng.uniform(400.0, 900.0), rng.uniform(1100.0, 2000.0), rng.uniform(2200.0, 3200.0)]
    )
    formant_widths = np.array([150.0, 250.0, 350.0]) * rng.uniform(0.8, 1.3)
    formant_gains = np.array([1.0, rng.uniform(0.3, 0.8), rng.uniform(0.1, 0.4)])

    max_harmonic_hz = min(5000.0, 0.45 * sample_rate)
    harmonics = np.arange(1, int(max_harmonic_hz / f0) + 1)
    freqs = harmonics * f0
    envelope = np.sum(
        formant_gains[:, None]
        * np.exp(-0.5 * ((freqs[None, :] - formant_centers[:, None]) / formant_widths[:, None]) ** 2),
        axis=0,
    )
    envelope += 0.05 * np.exp(-freqs / 600.0)
    envelope /= 1.0 + (freqs / 3800.0) ** 6

    phases = rng.uniform(0.0, 2.0 * np.pi, size=harmonics.size)
    x = np.sum(
        envelope[:, None] * np.sin(2.0 * np.pi * freqs[:, None] * t[None, :] + phases[:, None]),
        axis=0,
    )

    am_rate = rng.uniform(2.0, 8.0)
    am_phase = rng.uniform(0.0, 2.0 * np.pi)
    depth = 0.7
    x *= (1.0 - depth) + depth * 0.5 * (1.0 + np.sin(2.0 * np.pi * am_rate * t + am_phase))
    return x


def _pink_noise(rng: np.random.Generator, num_samples: int, sample_rate: int) -> np.ndarray:
    """Gaussian noise with a 1/f power envelope (flattened below 20 Hz)."""
    spectrum = np.fft.rfft(rng.standard_normal(num_samples))
    freqs = np.fft.rfftfreq(num_samples, 1.0 / sample_rate)
    spectrum /= np.sqrt(np.maximum(freqs, 20.0))
    return np.fft.irfft(spectrum, n=num_samples)


def _noise(rng: np.random.Generator, kind: str, num_samples: int, sample_rate: int) -> np.ndarray:
    if kind == "white":
        return rng.standard_normal(num_samples)
    if kind == "pink":
        x = _pink_noise(rng, num_samples, sample_rate)
    else:  # babble
        x = sum(_voice(rng, num_samples, sample_rate) for _ in range(5))
    # broadband floor keeps every band statistically alive
    x = x / np.sqrt(np.mean(x**2))
    return x + 0.05 * rng.standard_normal(num_samples)


_NOISE_KINDS = ("white", "pink", "babble")


def synth_fixtures(
    count: int,
    seed: int,
    sample_rate: int = 16000,
    duration: float = 2.0,
    out_dir: str = ".",
    snr_db: float = 0.0,
) -> DatasetManifest:
    """Render ``count`` clean/noise WAV pairs and return their manifest.

    The same ``seed`` always produces bit-identical files. Noise kinds
    cycle through white, pink, and babble.
    """
    if count < 1:
        raise InvalidInputError("count must be >= 1")
    os.makedirs(out_dir, exist_ok=True)
    num_samples = int(round(duration * sample_rate))

    entries = []
    for idx in range(count):
        entry_seed = seed * 1_000_003 + idx
        rng = np.random.default_rng(entry_seed)

        clean = _voice(rng, num_samples, sample_rate)
        clean *= 0.5 / np.max(np.abs(clean))
        noise = _noise(rng, _NOISE_KINDS[idx % len(_NOISE_KINDS)], num_samples, sample_rate)
        noise *= 0.5 / np.max(np.abs(noise))

        clean_path = os.path.join(out_dir, f"clean_{idx:03d}.wav")
        noise_path = os.path.join(out_dir, f"noise_{idx:03d}.wav")
        write_wav(clean_path, TimeSignal(clean, sample_rate))
        write_wav(noise_path, TimeSignal(noise, sample_rate))
        entries.append(
            ManifestEntry(
                clean_path=os.path.abspath(clean_path),
                noise_path=os.path.abspath(noise_path),
                snr_db=float(snr_db),
                seed=entry_seed,
            )
        )
    return DatasetManifest(entries=tuple(entries), sample_rate=sample_rate)
