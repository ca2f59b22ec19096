"""End-to-end enhancement runs and distortion scoring."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .audio_io import read_wav, write_wav
from .dataset import DatasetManifest, ManifestEntry
from .errors import InvalidInputError, WarpbankError
from .features import log_magnitude
from .filterbank import FilterbankSpec, wfbf_analyze, wfbf_synthesize
from .masking import MaskEstimator, apply_mask, cost_mse, psm_oracle
from .signals import TimeSignal, mix_at_snr
from .stft import StftParams, stft_analyze, stft_synthesize

# Residual energy below this fraction of the reference energy scores
# the capped SDR.
_SDR_CAP_DB = 100.0
_SDR_CAP_RATIO = 1e-20


def sdr(reference: TimeSignal, estimate: TimeSignal) -> float:
    """Signal-to-distortion ratio in dB.

    ``10 log10(sum(s^2) / sum((s_hat - s)^2))``, returning the +100 dB
    cap when the residual falls below 1e-20 of the reference energy.
    This is the plain energy-ratio definition, with no allowance for
    gain or filtering of the reference.
    """
    if len(reference) != len(estimate):
        raise InvalidInputError(
            f"length mismatch: reference {len(reference)}, estimate {len(estimate)}"
        )
    ref_energy = reference.energy
    if ref_energy == 0.0:
        raise InvalidInputError("reference has zero energy")
    residual = float(np.sum((estimate.samples - reference.samples) ** 2))
    if residual <= _SDR_CAP_RATIO * ref_energy:
        return _SDR_CAP_DB
    return float(10.0 * np.log10(ref_energy / residual))


@dataclass(frozen=True)
class UtteranceScore:
    index: int
    clean_path: str
    input_sdr_db: float | None
    output_sdr_db: float | None
    mask_cost: float | None = None
    error: str | None = None


@dataclass(frozen=True)
class EvalResult:
    """Scores for one (transform, estimator, SNR) condition."""

    per_utterance: tuple[UtteranceScore, ...]
    condition: dict

    def _scores(self, attr: str) -> np.ndarray:
        vals = [getattr(u, attr) for u in self.per_utterance if u.error is None]
        return np.asarray(vals, dtype=np.float64)

    @property
    def mean_input_sdr_db(self) -> float:
        return float(np.mean(self._scores("input_sdr_db")))

    @property
    def mean_output_sdr_db(self) -> float:
        return float(np.mean(self._scores("output_sdr_db")))

    @property
    def std_output_sdr_db(self) -> float:
        return float(np.std(self._scores("output_sdr_db")))

    @property
    def num_failed(self) -> int:
        return sum(1 for u in self.per_utterance if u.error is not None)

    def summary(self) -> dict:
        return {
            "condition": self.condition,
            "num_utterances": len(self.per_utterance),
            "num_failed": self.num_failed,
            "mean_input_sdr_db": self.mean_input_sdr_db,
            "mean_output_sdr_db": self.mean_output_sdr_db,
            "std_output_sdr_db": self.std_output_sdr_db,
            "mean_mask_cost": float(np.mean(self._scores("mask_cost"))),
        }


def _pad_to(signal: TimeSignal, length: int) -> TimeSignal:
    if len(signal) == length:
        return signal
    padded = np.zeros(length)
    padded[: len(signal)] = signal.samples
    return TimeSignal(padded, signal.sample_rate)


def _transform_label(transform) -> dict:
    if isinstance(transform, FilterbankSpec):
        return {
            "transform": f"wfbf-{transform.warping.kind}",
            "num_channels": transform.num_channels,
        }
    return {"transform": "stft", "num_channels": transform.num_bins}


def _enhance_one(
    entry: ManifestEntry,
    transform,
    estimator: MaskEstimator | None,
    oracle: bool,
    cost_mode: str,
) -> tuple[float, float, float, TimeSignal]:
    clean = read_wav(entry.clean_path)
    noise = read_wav(entry.noise_path)
    if len(noise) > len(clean):
        noise = TimeSignal(noise.samples[: len(clean)], noise.sample_rate)
    elif len(noise) < len(clean):
        raise InvalidInputError(
            f"noise shorter than clean: {len(noise)} < {len(clean)}"
        )
    mixture, _ = mix_at_snr(clean, noise, entry.snr_db)
    input_sdr = sdr(clean, mixture)

    if isinstance(transform, FilterbankSpec):
        target = transform.signal_length
        if len(clean) > target:
            raise InvalidInputError(
                f"signal of {len(clean)} samples exceeds the filterbank "
                f"length {target}"
            )
        noisy = wfbf_analyze(_pad_to(mixture, target), transform)
        clean_coeffs = wfbf_analyze(_pad_to(clean, target), transform)
        if oracle:
            mask = psm_oracle(clean_coeffs, noisy)
        else:
            mask = estimator.estimate(log_magnitude(noisy), noisy)
        recovered = wfbf_synthesize(apply_mask(mask, noisy), transform)
    else:
        noisy = stft_analyze(mixture, transform)
        clean_coeffs = stft_analyze(clean, transform)
        if oracle:
            mask = psm_oracle(clean_coeffs, noisy)
        else:
            mask = estimator.estimate(log_magnitude(noisy), noisy)
        recovered = stft_synthesize(apply_mask(mask, noisy), transform, len(mixture))

    cost = cost_mse(mask, noisy, clean_coeffs, average=cost_mode == "mean")
    enhanced = TimeSignal(recovered.samples[: len(clean)], clean.sample_rate)
    return input_sdr, sdr(clean, enhanced), cost, enhanced


def run_enhancement(
    manifest: DatasetManifest,
    transform,
    estimator: MaskEstimator | None = None,
    oracle: bool = False,
    workers: int = 1,
    save_audio_dir: str | None = None,
    cost_mode: str = "mean",
) -> EvalResult:
    """Mix, mask, resynthesize, and score every manifest entry.

    ``transform`` is a :class:`StftParams` or :class:`FilterbankSpec`.
    Exactly one of ``estimator`` / ``oracle`` selects the mask source;
    the oracle uses the truncated phase-sensitive mask computed from the
    clean reference. ``cost_mode`` picks per-bin-averaged ("mean") or
    summed ("sum") masking cost. Per-entry failures are recorded on
    their score row; the run only raises if every entry fails.
    """
    if oracle == (estimator is not None):
        raise InvalidInputError("pass either an estimator or oracle=True")
    if not isinstance(transform, (StftParams, FilterbankSpec)):
        raise InvalidInputError("transform must be StftParams or FilterbankSpec")
    if cost_mode not in ("mean", "sum"):
        raise InvalidInputError("cost_mode must be 'mean' or 'sum'")
    if save_audio_dir is not None:
        os.makedirs(save_audio_dir, exist_ok=True)

    def process(item) -> UtteranceScore:
        index, entry = item
        try:
            input_sdr, output_sdr, cost, enhanced = _enhance_one(
                entry, transform, estimator, oracle, cost_mode
            )
        except (WarpbankError, OSError, ValueError) as exc:
            return UtteranceScore(index, entry.clean_path, None, None, None, str(exc))
        if save_audio_dir is not None:
            write_wav(
                os.path.join(save_audio_dir, f"enhanced_{index:03d}.wav"), enhanced
            )
        return UtteranceScore(index, entry.clean_path, input_sdr, output_sdr, cost)

    items = list(enumerate(manifest.entries))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            scores = list(pool.map(process, items))
    else:
        scores = [process(item) for item in items]

    if all(s.error is not None for s in scores):
        raise WarpbankError(
            f"all {len(scores)} entries failed; first error: {scores[0].error}"
        )

    snrs = {e.snr_db for e in manifest.entries}
    condition = _transform_label(transform)
    condition["estimator"] = "oracle" if oracle else getattr(
        estimator, "name", type(estimator).__name__.lower()
    )
    condition["snr_db"] = snrs.pop() if len(snrs) == 1 else "mixed"
    return EvalResult(per_utterance=tuple(scores), condition=condition)
