"""Tests for manifests, WAV I/O, and the synthetic fixture generator."""

import numpy as np
import pytest

from warpbank import (
    DatasetManifest,
    DesignConfig,
    InvalidInputError,
    TimeSignal,
    read_wav,
    synth_fixtures,
    welch_psd,
    write_wav,
)


class TestWavIo:
    def test_float32_round_trip(self, tmp_path, rng):
        x = rng.uniform(-0.9, 0.9, 1000)
        path = tmp_path / "f.wav"
        write_wav(path, TimeSignal(x, 16000))
        back = read_wav(path)
        assert back.sample_rate == 16000
        assert np.allclose(back.samples, x, atol=1e-7)

    def test_pcm16_round_trip(self, tmp_path, rng):
        x = rng.uniform(-0.9, 0.9, 1000)
        path = tmp_path / "p.wav"
        write_wav(path, TimeSignal(x, 8000), encoding="pcm16")
        back = read_wav(path)
        assert back.sample_rate == 8000
        assert np.max(np.abs(back.samples - x)) <= 0.5 / 32768 + 1e-12

    def test_unknown_encoding_rejected(self, tmp_path):
        with pytest.raises(InvalidInputError):
            write_wav(tmp_path / "x.wav", TimeSignal(np.ones(4), 8000), encoding="mp3")


class TestSynthFixtures:
    def test_same_seed_bit_identical(self, tmp_path):
        a = tmp_path / "a"
        b = tmp_path / "b"
        synth_fixtures(3, seed=42, duration=0.5, out_dir=str(a))
        synth_fixtures(3, seed=42, duration=0.5, out_dir=str(b))
        for name in ("clean_000.wav", "noise_001.wav", "clean_002.wav", "noise_002.wav"):
            assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_different_seed_differs(self, tmp_path):
        a = tmp_path / "a"
        b = tmp_path / "b"
        synth_fixtures(1, seed=1, duration=0.5, out_dir=str(a))
        synth_fixtures(1, seed=2, duration=0.5, out_dir=str(b))
        assert (a / "clean_000.wav").read_bytes() != (b / "clean_000.wav").read_bytes()

    def test_clean_energy_concentrates_below_4k(self, fixture_manifest):
        for entry in fixture_manifest.entries:
            clean = read_wav(entry.clean_path)
            psd = welch_psd(clean, DesignConfig())
            below = psd.sigma[psd.frequencies < 4000.0].sum()
            assert below / psd.sigma.sum() >= 0.95

    def test_pink_noise_has_decreasing_psd_trend(self, fixture_manifest):
        # entries cycle white, pink, babble; index 1 is pink
        noise = read_wav(fixture_manifest.entries[1].noise_path)
        psd = welch_psd(noise, DesignConfig())
        keep = psd.frequencies > 50.0
        slope = np.polyfit(
            np.log(psd.frequencies[keep]), np.log(psd.sigma[keep]), 1
        )[0]
        assert slope < -0.5

    def test_white_noise_is_broadband(self, fixture_manifest):
        noise = read_wav(fixture_manifest.entries[0].noise_path)
        psd = welch_psd(noise, DesignConfig())
        assert psd.sigma.max() / psd.sigma.mean() < 5.0

    def test_count_validated(self, tmp_path):
        with pytest.raises(InvalidInputError):
            synth_fixtures(0, seed=1, out_dir=str(tmp_path))


class TestManifest:
    def test_save_load_round_trip(self, tmp_path, fixture_manifest):
        path = tmp_path / "m.json"
        fixture_manifest.save(path)
        loaded = DatasetManifest.load(path)
        assert loaded.sample_rate == fixture_manifest.sample_rate
        assert len(loaded) == len(fixture_manifest)
        for a, b in zip(loaded.entries, fixture_manifest.entries):
            assert a.snr_db == b.snr_db
            assert a.seed == b.seed
            assert read_wav(a.clean_path).samples.shape == read_wav(b.clean_path).samples.shape

    def test_missing_file_rejected(self, tmp_path, fixture_manifest):
        path = tmp_path / "m.json"
        fixture_manifest.save(path)
        import json

        data = json.loads(path.read_text())
        data["entries"][0]["clean_path"] = "nope.wav"
        path.write_text(json.dumps(data))
        with pytest.raises(InvalidInputError, match="missing"):
            DatasetManifest.load(path)

    def test_rate_mismatch_rejected(self, tmp_path, fixture_manifest):
        path = tmp_path / "m.json"
        fixture_manifest.save(path)
        import json

        data = json.loads(path.read_text())
        data["sample_rate"] = 8000
        path.write_text(json.dumps(data))
        with pytest.raises(InvalidInputError, match="sample rate"):
            DatasetManifest.load(path)

    def test_with_snr(self, fixture_manifest):
        leveled = fixture_manifest.with_snr(-6.0)
        assert all(e.snr_db == -6.0 for e in leveled.entries)
        assert [e.clean_path for e in leveled.entries] == [
            e.clean_path for e in fixture_manifest.entries
        ]
