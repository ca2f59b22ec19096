"""Tests for SDR scoring and the enhancement runner."""

import numpy as np
import pytest

from warpbank import (
    InvalidInputError,
    OnesEstimator,
    StftParams,
    TimeSignal,
    build_filterbank,
    run_enhancement,
    sdr,
    warping_stft,
    wiener_baseline_estimator,
)


class TestSdr:
    def test_perfect_estimate_hits_cap(self, rng):
        x = TimeSignal(rng.standard_normal(1000), 16000)
        assert sdr(x, x) == 100.0

    def test_equal_energy_error_gives_zero_db(self, rng):
        s = rng.standard_normal(1000)
        e = rng.standard_normal(1000)
        e *= np.linalg.norm(s) / np.linalg.norm(e)
        assert sdr(TimeSignal(s, 16000), TimeSignal(s + e, 16000)) == pytest.approx(
            0.0, abs=1e-9
        )

    def test_zero_estimate_gives_zero_db(self, rng):
        s = TimeSignal(rng.standard_normal(1000), 16000)
        z = TimeSignal(np.zeros(1000), 16000)
        # residual (0 - s) has exactly the reference energy
        assert sdr(s, z) == pytest.approx(0.0, abs=1e-12)

    def test_joint_scale_invariance(self, rng):
        s = rng.standard_normal(1000)
        est = s + 0.1 * rng.standard_normal(1000)
        base = sdr(TimeSignal(s, 16000), TimeSignal(est, 16000))
        for alpha in (0.25, -3.0, 17.5):
            scaled = sdr(
                TimeSignal(alpha * s, 16000), TimeSignal(alpha * est, 16000)
            )
            assert scaled == pytest.approx(base, abs=1e-9)

    def test_zero_reference_rejected(self, rng):
        z = TimeSignal(np.zeros(100), 16000)
        x = TimeSignal(rng.standard_normal(100), 16000)
        with pytest.raises(InvalidInputError):
            sdr(z, x)

    def test_length_mismatch_rejected(self, rng):
        a = TimeSignal(rng.standard_normal(100), 16000)
        b = TimeSignal(rng.standard_normal(99), 16000)
        with pytest.raises(InvalidInputError):
            sdr(a, b)


class TestRunEnhancement:
    def stft_params(self):
        return StftParams.hann(512, 256)

    def filterbank(self, length=16000):
        return build_filterbank(warping_stft(1.0), 64, length, 16000, redundancy=1.5)

    def test_identity_mask_preserves_sdr(self, fixture_manifest):
        for transform in (self.stft_params(), self.filterbank()):
            result = run_enhancement(
                fixture_manifest, transform, estimator=OnesEstimator()
            )
            for u in result.per_utterance:
                assert u.error is None
                assert abs(u.output_sdr_db - u.input_sdr_db) < 0.01

    def test_oracle_improves_every_utterance(self, fixture_manifest):
        result = run_enhancement(fixture_manifest, self.stft_params(), oracle=True)
        for u in result.per_utterance:
            assert u.output_sdr_db > u.input_sdr_db

    def test_wiener_improves_mean_sdr(self, fixture_manifest):
        result = run_enhancement(
            fixture_manifest,
            self.stft_params(),
            estimator=wiener_baseline_estimator(8),
        )
        assert result.mean_output_sdr_db > result.mean_input_sdr_db

    def test_deterministic_given_seeds(self, fixture_manifest):
        a = run_enhancement(fixture_manifest, self.stft_params(), oracle=True)
        b = run_enhancement(fixture_manifest, self.stft_params(), oracle=True)
        for ua, ub in zip(a.per_utterance, b.per_utterance):
            assert ua.output_sdr_db == ub.output_sdr_db
            assert ua.mask_cost == ub.mask_cost

    def test_workers_do_not_change_results(self, fixture_manifest):
        a = run_enhancement(fixture_manifest, self.stft_params(), oracle=True)
        b = run_enhancement(
            fixture_manifest, self.stft_params(), oracle=True, workers=4
        )
        for ua, ub in zip(a.per_utterance, b.per_utterance):
            assert ua.output_sdr_db == ub.output_sdr_db

    def test_condition_metadata(self, fixture_manifest):
        result = run_enhancement(
            fixture_manifest.with_snr(6.0), self.filterbank(), oracle=True
        )
        cond = result.condition
        assert cond["transform"] == "wfbf-linear"
        assert cond["num_channels"] == 64
        assert cond["estimator"] == "oracle"
        assert cond["snr_db"] == 6.0

    def test_exactly_one_mask_source(self, fixture_manifest):
        with pytest.raises(InvalidInputError):
            run_enhancement(fixture_manifest, self.stft_params())
        with pytest.raises(InvalidInputError):
            run_enhancement(
                fixture_manifest,
                self.stft_params(),
                estimator=OnesEstimator(),
                oracle=True,
            )

    def test_per_entry_failure_recorded_not_fatal(self, fixture_manifest):
        # filterbank shorter than the signals: every entry fails except none;
        # use a length so signals exceed it
        small = self.filterbank(length=8192)
        with pytest.raises(Exception, match="failed"):
            run_enhancement(fixture_manifest, small, oracle=True)

    def test_failure_subset_surfaced(self, tmp_path, fixture_manifest):
        # break one entry's file, keep the rest
        from warpbank import DatasetManifest

        path = tmp_path / "m.json"
        fixture_manifest.save(path)
        manifest = DatasetManifest.load(path)
        broken = tmp_path / "broken.wav"
        broken.write_bytes(b"not a wav file")
        entries = list(manifest.entries)
        from warpbank import ManifestEntry

        entries[0] = ManifestEntry(str(broken), entries[0].noise_path, 0.0, 0)
        manifest = DatasetManifest(tuple(entries), manifest.sample_rate)
        result = run_enhancement(manifest, self.stft_params(), oracle=True)
        assert result.per_utterance[0].error is not None
        assert result.num_failed == 1
        assert all(u.error is None for u in result.per_utterance[1:])

    def test_save_audio(self, tmp_path, fixture_manifest):
        out = tmp_path / "enh"
        run_enhancement(
            fixture_manifest, self.stft_params(), oracle=True, save_audio_dir=str(out)
        )
        files = sorted(p.name for p in out.iterdir())
        assert files == [f"enhanced_{i:03d}.wav" for i in range(len(fixture_manifest))]

    def test_summary_fields(self, fixture_manifest):
        result = run_enhancement(fixture_manifest, self.stft_params(), oracle=True)
        summary = result.summary()
        assert summary["num_utterances"] == len(fixture_manifest)
        assert summary["num_failed"] == 0
        assert summary["mean_output_sdr_db"] > summary["mean_input_sdr_db"]
        assert summary["mean_mask_cost"] >= 0.0
