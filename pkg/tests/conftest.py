import numpy as np
import pytest

from warpbank import synth_fixtures


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def fixture_manifest(tmp_path_factory):
    """Small shared dataset: 6 pairs, 1 s at 16 kHz, mixed at 0 dB."""
    out = tmp_path_factory.mktemp("fixtures")
    return synth_fixtures(
        count=6, seed=101, sample_rate=16000, duration=1.0, out_dir=str(out)
    )
