"""warpbank: data-driven perfect-reconstruction warped filterbanks.

Design a frequency warping from the statistics of oracle masking
residuals, build a perfect-reconstruction filterbank on it, apply
time-frequency masks in that domain, and score the result.
"""

__version__ = "0.1.0"

from .audio_io import read_wav, write_wav
from .dataset import DatasetManifest, ManifestEntry, synth_fixtures
from .design import (
    DesignConfig,
    ErrorPsd,
    FrequencyWeights,
    WelchSettings,
    band_error_variance,
    compute_weights,
    design_warping,
    oracle_error,
    welch_psd,
)
from .errors import (
    ConfigurationError,
    DegenerateInputError,
    InvalidInputError,
    NonInvertibleFrameError,
    WarpbankError,
)
from .evaluate import EvalResult, UtteranceScore, run_enhancement, sdr
from .features import FeatureMatrix, MelTransform, log_magnitude, mel_features
from .filterbank import (
    FilterbankSpec,
    WfbfChannel,
    build_filterbank,
    export_frequency_response,
    load_filterbank,
    save_filterbank,
    wfbf_analyze,
    wfbf_synthesize,
)
from .masking import (
    Mask,
    MaskEstimator,
    OnesEstimator,
    WienerEstimator,
    apply_mask,
    cost_mse,
    cost_weighted_mse,
    psm_oracle,
    truncate,
    wiener_baseline_estimator,
)
from .signals import (
    Spectrum,
    TimeSignal,
    dft_forward,
    dft_inverse,
    hann_periodic,
    measured_snr_db,
    mix_at_snr,
)
from .stft import StftParams, TfCoefficients, stft_analyze, stft_synthesize
from .warping import (
    LinearWarping,
    LogarithmicWarping,
    TabulatedWarping,
    WarpingFunction,
    warping_from_dict,
    warping_stft,
    warping_wavelet,
)

__all__ = [name for name in dir() if not name.startswith("_")]
