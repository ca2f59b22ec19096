"""Tests for the warped filterbank: construction, reconstruction, files."""

import numpy as np
import pytest

from warpbank import (
    ConfigurationError,
    InvalidInputError,
    TabulatedWarping,
    TimeSignal,
    WarpingFunction,
    build_filterbank,
    export_frequency_response,
    load_filterbank,
    save_filterbank,
    warping_stft,
    warping_wavelet,
    wfbf_analyze,
    wfbf_synthesize,
)

FS = 16000


def learned_like_warping():
    """Tabulated warping from a density bump between 100 and 800 Hz."""
    freqs = np.arange(257) * (FS / 512)
    density = 0.05 + np.exp(-0.5 * ((freqs - 450.0) / 250.0) ** 2)
    return TabulatedWarping(np.column_stack([freqs, np.cumsum(density)]))


def rel_error(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(b)


class TestBuildLinear:
    def test_uniform_centers_and_decimations(self):
        fb = build_filterbank(warping_stft(1.0), 64, 16384, FS, redundancy=1.5)
        centers = fb.center_frequencies
        expected = 8000.0 * np.arange(65) / 64
        assert np.allclose(centers, expected, rtol=1e-12, atol=1e-9)
        spacing = np.diff(centers)
        assert np.max(np.abs(spacing - spacing[0])) <= 1e-9 * spacing[0]
        assert len(set(fb.decimations)) == 1

    def test_uniform_bandwidths(self):
        fb = build_filterbank(warping_stft(1.0), 64, 16384, FS, redundancy=1.5)
        interior = [ch.bandwidth_hz for ch in fb.channels[1:-1]]
        assert np.max(np.abs(np.diff(interior))) <= 1e-9 * interior[0]

    def test_slope_is_normalized_away(self):
        a = build_filterbank(warping_stft(1.0), 32, 4096, FS)
        b = build_filterbank(warping_stft(7.0), 32, 4096, FS)
        assert np.allclose(a.center_frequencies, b.center_frequencies)


class TestBuildWavelet:
    def test_geometric_centers_above_fmin(self):
        fb = build_filterbank(warping_wavelet(2.0, 100.0), 64, 16384, FS)
        centers = fb.center_frequencies
        above = centers[centers > 200.0][:-1]
        ratios = above[1:] / above[:-1]
        assert np.max(np.abs(ratios - ratios[0])) <= 1e-9

    def test_low_bands_narrow_high_bands_wide(self):
        fb = build_filterbank(warping_wavelet(2.0, 100.0), 64, 16384, FS)
        widths = [ch.bandwidth_hz for ch in fb.channels]
        assert widths[10] < widths[-2]
        low = sum(1 for c in fb.center_frequencies if c < 2000.0)
        assert low > len(fb.channels) / 2  # denser low-frequency tiling


class TestBuildLearned:
    def test_dense_where_density_is_high(self):
        fb = build_filterbank(learned_like_warping(), 64, 16384, FS)
        centers = fb.center_frequencies
        in_band = np.sum((centers >= 100.0) & (centers <= 800.0))
        out_band = np.sum(centers > 800.0)
        per_hz_in = in_band / 700.0
        per_hz_out = out_band / (8000.0 - 800.0)
        assert per_hz_in > 3.0 * per_hz_out

    def test_centers_strictly_increasing(self):
        fb = build_filterbank(learned_like_warping(), 64, 16384, FS)
        assert np.all(np.diff(fb.center_frequencies) > 0)


class TestBuildValidation:
    def test_too_few_channels_rejected(self):
        with pytest.raises(ConfigurationError):
            build_filterbank(warping_stft(1.0), 1, 4096, FS)

    def test_redundancy_below_one_rejected(self):
        with pytest.raises(ConfigurationError):
            build_filterbank(warping_stft(1.0), 16, 4096, FS, redundancy=0.5)

    def test_odd_length_rejected(self):
        with pytest.raises(ConfigurationError):
            build_filterbank(warping_stft(1.0), 16, 4097, FS)

    def test_infeasible_redundancy_reports_feasible(self):
        with pytest.raises(ConfigurationError, match="feasible"):
            build_filterbank(warping_stft(1.0), 16, 4096, FS, redundancy=1e6)

    def test_non_monotone_warping_rejected(self):
        class Wobble(WarpingFunction):
            kind = "wobble"

            def warp(self, f):
                return np.sin(np.asarray(f) / 500.0)

            def unwarp(self, xi):
                return xi

            def to_dict(self):
                return {"kind": "wobble"}

        with pytest.raises(ConfigurationError, match="increasing"):
            build_filterbank(Wobble(), 16, 4096, FS)

    def test_too_many_channels_rejected(self):
        with pytest.raises(ConfigurationError, match="no DFT bin"):
            build_filterbank(warping_stft(1.0), 300, 256, FS)


class TestFrameProperties:
    @pytest.mark.parametrize(
        "warping", [warping_stft(1.0), warping_wavelet(2.0, 100.0), learned_like_warping()]
    )
    def test_structural_validation_passes(self, warping):
        fb = build_filterbank(warping, 64, 16384, FS, redundancy=1.5)
        fb.validate()  # painless + positivity + duality

    def test_dual_identity_explicit(self):
        fb = build_filterbank(warping_wavelet(2.0, 100.0), 64, 16384, FS)
        unity = np.zeros(fb.num_bins)
        for ch, dual, weight in zip(fb.channels, fb.dual_responses, fb.frame_weights):
            lo, hi = ch.support
            unity[lo : hi + 1] += (weight / ch.decimation) * ch.freq_response * dual
        assert np.max(np.abs(unity - 1.0)) <= 1e-10

    def test_response_table_row_sums_match_frame_diagonal(self):
        fb = build_filterbank(learned_like_warping(), 32, 8192, FS)
        table = export_frequency_response(fb)
        assert np.allclose(table[:, 0], np.arange(fb.num_bins) * fb.bin_hz)
        weighted = np.zeros(fb.num_bins)
        for w, ch in enumerate(fb.channels):
            weighted += (fb.frame_weights[w] / ch.decimation) * table[:, w + 1] ** 2
        assert np.allclose(weighted, fb.frame_diagonal(), rtol=1e-12)

    def test_achieved_redundancy_not_below_request(self):
        for redundancy in (1.5, 3.0):
            fb = build_filterbank(warping_stft(1.0), 64, 16384, FS, redundancy)
            assert fb.achieved_redundancy >= redundancy


class TestAnalyze:
    def test_zero_signal(self):
        fb = build_filterbank(warping_stft(1.0), 32, 8192, FS)
        coeffs = wfbf_analyze(TimeSignal(np.zeros(8192), FS), fb)
        assert all(np.all(ch == 0) for ch in coeffs.channels)

    def test_length_mismatch_rejected(self, rng):
        fb = build_filterbank(warping_stft(1.0), 32, 8192, FS)
        with pytest.raises(InvalidInputError):
            wfbf_analyze(TimeSignal(rng.standard_normal(4096), FS), fb)

    def test_frame_counts_follow_decimation(self, rng):
        fb = build_filterbank(warping_wavelet(2.0, 100.0), 64, 16384, FS)
        coeffs = wfbf_analyze(TimeSignal(rng.standard_normal(16384), FS), fb)
        expected = tuple(16384 // ch.decimation for ch in fb.channels)
        assert coeffs.frame_counts == expected

    def test_linearity(self, rng):
        fb = build_filterbank(warping_wavelet(2.0, 100.0), 32, 8192, FS)
        s = rng.standard_normal(8192)
        n = rng.standard_normal(8192)
        cs = wfbf_analyze(TimeSignal(s, FS), fb)
        cn = wfbf_analyze(TimeSignal(n, FS), fb)
        cx = wfbf_analyze(TimeSignal(s + n, FS), fb)
        for a, b, c in zip(cs.channels, cn.channels, cx.channels):
            assert np.max(np.abs(c - (a + b))) <= 1e-12

    @pytest.mark.parametrize("channel_index", [10, 32, 50])
    def test_sinusoid_energy_concentrates_in_its_channel(self, channel_index):
        fb = build_filterbank(learned_like_warping(), 64, 16384, FS)
        center_bin = int(round(fb.channels[channel_index].center_hz / fb.bin_hz))
        x = np.sin(2 * np.pi * center_bin * np.arange(16384) / 16384)
        coeffs = wfbf_analyze(TimeSignal(x, FS), fb)
        energies = np.array([np.sum(np.abs(ch) ** 2) for ch in coeffs.channels])
        assert energies[channel_index] / energies.sum() >= 0.9


class TestSynthesize:
    @pytest.mark.parametrize(
        "warping", [warping_stft(1.0), warping_wavelet(2.0, 100.0), learned_like_warping()]
    )
    @pytest.mark.parametrize("length", [16000, 16384])
    def test_round_trip(self, rng, warping, length):
        fb = build_filterbank(warping, 64, length, FS, redundancy=1.5)
        x = rng.standard_normal(length)
        back = wfbf_synthesize(wfbf_analyze(TimeSignal(x, FS), fb), fb)
        assert rel_error(back.samples, x) <= 1e-8

    def test_layout_mismatch_rejected(self, rng):
        fb_a = build_filterbank(warping_stft(1.0), 32, 8192, FS)
        fb_b = build_filterbank(warping_stft(1.0), 16, 8192, FS)
        coeffs = wfbf_analyze(TimeSignal(rng.standard_normal(8192), FS), fb_a)
        with pytest.raises(InvalidInputError):
            wfbf_synthesize(coeffs, fb_b)

    def test_additivity_of_synthesis(self, rng):
        fb = build_filterbank(warping_wavelet(2.0, 100.0), 32, 8192, FS)
        s = TimeSignal(rng.standard_normal(8192), FS)
        n = TimeSignal(rng.standard_normal(8192), FS)
        cs = wfbf_analyze(s, fb)
        cn = wfbf_analyze(n, fb)
        both = cs.replace_channels(
            [a + b for a, b in zip(cs.channels, cn.channels)]
        )
        out = wfbf_synthesize(both, fb)
        assert rel_error(out.samples, s.samples + n.samples) <= 1e-8


class TestSerialization:
    @pytest.mark.parametrize(
        "warping", [warping_stft(1.0), warping_wavelet(2.0, 100.0), learned_like_warping()]
    )
    def test_file_round_trip(self, tmp_path, rng, warping):
        fb = build_filterbank(warping, 32, 8192, FS, redundancy=2.0)
        path = tmp_path / "fb.json"
        save_filterbank(fb, path)
        loaded = load_filterbank(path)

        assert loaded.sample_rate == fb.sample_rate
        assert loaded.signal_length == fb.signal_length
        assert loaded.num_channels == fb.num_channels
        assert loaded.redundancy == fb.redundancy
        assert loaded.decimations == fb.decimations
        for a, b in zip(loaded.channels, fb.channels):
            assert a.support == b.support
            assert a.center_hz == b.center_hz
            assert np.array_equal(a.freq_response, b.freq_response)
        for a, b in zip(loaded.dual_responses, fb.dual_responses):
            assert np.array_equal(a, b)

        x = rng.standard_normal(8192)
        back = wfbf_synthesize(wfbf_analyze(TimeSignal(x, FS), loaded), loaded)
        assert rel_error(back.samples, x) <= 1e-8

    def test_version_checked(self, tmp_path):
        fb = build_filterbank(warping_stft(1.0), 16, 4096, FS)
        path = tmp_path / "fb.json"
        save_filterbank(fb, path)
        import json

        data = json.loads(path.read_text())
        data["version"] = 99
        path.write_text(json.dumps(data))
        with pytest.raises(ConfigurationError, match="version"):
            load_filterbank(path)
