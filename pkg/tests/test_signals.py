"""Tests for signals: DFT pair, SNR mixing, domain types."""

import numpy as np
import pytest

from warpbank import (
    DegenerateInputError,
    InvalidInputError,
    TimeSignal,
    dft_forward,
    dft_inverse,
    hann_periodic,
    measured_snr_db,
    mix_at_snr,
)


def direct_dft(x):
    """Reference O(L^2) unitary DFT used as the independent oracle."""
    n = len(x)
    k = np.arange(n)
    kernel = np.exp(-2j * np.pi * np.outer(k, k) / n)
    return kernel @ x / np.sqrt(n)


class TestTimeSignal:
    def test_rejects_empty(self):
        with pytest.raises(InvalidInputError):
            TimeSignal(np.array([]), 16000)

    def test_rejects_non_finite(self):
        with pytest.raises(InvalidInputError, match="non-finite"):
            TimeSignal(np.array([1.0, np.nan]), 16000)
        with pytest.raises(InvalidInputError):
            TimeSignal(np.array([1.0, np.inf]), 16000)

    def test_rejects_bad_rate(self):
        with pytest.raises(InvalidInputError):
            TimeSignal(np.array([1.0]), 0)

    def test_samples_are_read_only(self):
        sig = TimeSignal(np.ones(4), 8000)
        with pytest.raises(ValueError):
            sig.samples[0] = 2.0

    def test_duration_and_power(self):
        sig = TimeSignal(np.full(8000, 2.0), 8000)
        assert sig.duration == pytest.approx(1.0)
        assert sig.power == pytest.approx(4.0)


class TestDftForward:
    def test_constant_signal_is_dc_only(self):
        spec = dft_forward(TimeSignal(np.ones(4), 4))
        assert spec.bins[0] == pytest.approx(2.0)  # 4 / sqrt(4)
        assert np.allclose(spec.bins[1:], 0.0, atol=1e-15)

    def test_impulse_has_flat_magnitude(self):
        spec = dft_forward(TimeSignal(np.array([1.0, 0, 0, 0]), 4))
        assert np.allclose(np.abs(spec.bins), 0.5)

    def test_matches_direct_dft(self, rng):
        x = rng.standard_normal(64)
        got = dft_forward(TimeSignal(x, 16000)).bins
        want = direct_dft(x)
        assert np.max(np.abs(got - want)) <= 1e-12

    @pytest.mark.parametrize("length", [64, 128, 37, 100, 1000])
    def test_round_trip(self, rng, length):
        x = rng.standard_normal(length)
        sig = TimeSignal(x, 16000)
        back = dft_inverse(dft_forward(sig))
        assert np.linalg.norm(back.samples - x) / np.linalg.norm(x) <= 1e-12
        assert back.sample_rate == 16000

    @pytest.mark.parametrize("length", [64, 37, 4096])
    def test_parseval(self, rng, length):
        sig = TimeSignal(rng.standard_normal(length), 16000)
        spec = dft_forward(sig)
        assert spec.energy == pytest.approx(sig.energy, rel=1e-10)

    def test_conjugate_symmetry_of_real_signal(self, rng):
        spec = dft_forward(TimeSignal(rng.standard_normal(128), 16000))
        assert spec.is_conjugate_symmetric()

    def test_resolution(self):
        spec = dft_forward(TimeSignal(np.ones(100), 16000))
        assert spec.resolution == pytest.approx(160.0)


class TestMixAtSnr:
    def test_equal_power_zero_db_keeps_noise(self, rng):
        clean = TimeSignal(rng.standard_normal(1000), 16000)
        noise = TimeSignal(rng.standard_normal(1000), 16000)
        noise = TimeSignal(noise.samples * np.sqrt(clean.power / noise.power), 16000)
        mixture, scaled = mix_at_snr(clean, noise, 0.0)
        assert np.allclose(scaled.samples, noise.samples, rtol=1e-12)
        assert np.array_equal(mixture.samples, clean.samples + scaled.samples)

    def test_six_db_scale_factor(self, rng):
        clean = TimeSignal(rng.standard_normal(1000), 16000)
        noise = TimeSignal(rng.standard_normal(1000), 16000)
        noise = TimeSignal(noise.samples * np.sqrt(clean.power / noise.power), 16000)
        _, scaled = mix_at_snr(clean, noise, 6.0)
        factor = np.sqrt(scaled.power / noise.power)
        assert factor == pytest.approx(10 ** (-6 / 20), rel=1e-9)

    @pytest.mark.parametrize("snr_db", [-6.0, 0.0, 6.0])
    def test_requested_snr_is_hit_exactly(self, rng, snr_db):
        clean = TimeSignal(rng.standard_normal(2000), 16000)
        noise = TimeSignal(rng.uniform(-1, 1, 2000), 16000)
        _, scaled = mix_at_snr(clean, noise, snr_db)
        assert measured_snr_db(clean, scaled) == pytest.approx(snr_db, abs=1e-9)

    def test_zero_energy_inputs_rejected(self, rng):
        live = TimeSignal(rng.standard_normal(100), 16000)
        dead = TimeSignal(np.zeros(100), 16000)
        with pytest.raises(DegenerateInputError):
            mix_at_snr(dead, live, 0.0)
        with pytest.raises(DegenerateInputError):
            mix_at_snr(live, dead, 0.0)

    def test_mismatched_inputs_rejected(self, rng):
        a = TimeSignal(rng.standard_normal(100), 16000)
        b = TimeSignal(rng.standard_normal(101), 16000)
        with pytest.raises(InvalidInputError):
            mix_at_snr(a, b, 0.0)
        c = TimeSignal(rng.standard_normal(100), 8000)
        with pytest.raises(InvalidInputError):
            mix_at_snr(a, c, 0.0)


class TestHannPeriodic:
    def test_endpoints_and_midpoint(self):
        w = hann_periodic(8)
        assert w[0] == pytest.approx(0.0)
        assert w[4] == pytest.approx(1.0)

    def test_periodic_not_symmetric(self):
        # periodic form: w[n] != w[N-n] in general, but w[1] == w[N-1]
        w = hann_periodic(8)
        assert w[1] == pytest.approx(w[7])
