"""Perfect-reconstruction warped filterbanks.

The filterbank is a set of bandpass channels defined directly in the DFT
domain. A warping function is rescaled so the band ``[0 Hz, Nyquist]``
maps onto ``[0, num_channels]`` warped units; channel ``w`` is a Hann
bump of width two warped units centered at coordinate ``w``, sampled on
the non-negative DFT bins of the target signal length. Adjacent bumps
overlap only each other, so the frame operator is diagonal and the dual
(synthesis) filters are a bin-wise division.

Analysis multiplies the signal spectrum by each channel response and
inverse-transforms at the decimated rate; the decimation per channel is
a power of two dividing the signal length and small enough that the
aliased spectral copies stay disjoint (the painless condition). Under
that condition synthesis is exact: unfold each channel's decimated
spectrum onto its support, weight by the dual response, accumulate, and
inverse-transform once.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, InvalidInputError, NonInvertibleFrameError
from .signals import TimeSignal, _readonly
from .stft import TfCoefficients
from .warping import WarpingFunction, warping_from_dict

FORMAT_VERSION = 1

# Frame-operator values at or below this are treated as singular.
_FRAME_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class WfbfChannel:
    """One bandpass channel: response values on its support bins."""

    center_hz: float
    freq_response: np.ndarray
    support: tuple[int, int]
    decimation: int
    bandwidth_hz: float

    def __post_init__(self) -> None:
        resp = np.asarray(self.freq_response, dtype=np.float64)
        first, last = self.support
        if resp.ndim != 1 or resp.size != last - first + 1:
            raise InvalidInputError("response length must match the support range")
        if not np.all(np.isfinite(resp)) or np.any(resp < 0.0):
            raise InvalidInputError("channel response must be finite and non-negative")
        if self.decimation < 1:
            raise InvalidInputError("decimation must be >= 1")
        object.__setattr__(self, "freq_response", _readonly(resp))
        object.__setattr__(self, "support", (int(first), int(last)))

    @property
    def support_width(self) -> int:
        return self.support[1] - self.support[0] + 1


@dataclass(frozen=True, eq=False)
class FilterbankSpec:
    """A complete perfect-reconstruction warped filterbank.

    ``num_channels`` is the requested channel count; the built bank has
    one extra channel pinned to Nyquist, so ``len(channels) ==
    num_channels + 1``. ``dual_responses`` hold the synthesis filters
    ``response / frame_diagonal`` on the same support bins, and
    ``frame_weights`` the multiplicity (2 for interior channels of a
    real filterbank, 1 for the DC and Nyquist channels) used in the
    frame operator and in synthesis.
    """

    channels: tuple[WfbfChannel, ...]
    dual_responses: tuple[np.ndarray, ...]
    frame_weights: tuple[float, ...]
    signal_length: int
    sample_rate: int
    warping: WarpingFunction
    num_channels: int
    redundancy: float

    def __post_init__(self) -> None:
        if len(self.channels) != self.num_channels + 1:
            raise InvalidInputError(
                "expected num_channels + 1 physical channels (Nyquist included)"
            )
        if len(self.dual_responses) != len(self.channels):
            raise InvalidInputError("one dual response per channel required")
        duals = tuple(_readonly(np.asarray(d, dtype=np.float64)) for d in self.dual_responses)
        object.__setattr__(self, "dual_responses", duals)

    @property
    def num_bins(self) -> int:
        return self.signal_length // 2 + 1

    @property
    def bin_hz(self) -> float:
        return self.sample_rate / self.signal_length

    @property
    def center_frequencies(self) -> np.ndarray:
        return np.array([ch.center_hz for ch in self.channels])

    @property
    def decimations(self) -> tuple[int, ...]:
        return tuple(ch.decimation for ch in self.channels)

    @property
    def achieved_redundancy(self) -> float:
        """Coefficients produced per input sample."""
        return sum(self.signal_length // ch.decimation for ch in self.channels) / self.signal_length

    def frame_diagonal(self) -> np.ndarray:
        """Diagonal frame operator on the non-negative DFT bins."""
        diag = np.zeros(self.num_bins)
        for ch, weight in zip(self.channels, self.frame_weights):
            first, last = ch.support
            diag[first : last + 1] += (weight / ch.decimation) * ch.freq_response**2
        return diag

    def validate(self) -> None:
        """Check frame positivity, the painless condition, and duality."""
        diag = self.frame_diagonal()
        if np.min(diag) <= _FRAME_FLOOR:
            raise NonInvertibleFrameError(
                f"frame operator reaches {np.min(diag):.3e} at bin {int(np.argmin(diag))}"
            )
        for idx, ch in enumerate(self.channels):
            if self.signal_length % ch.decimation:
                raise ConfigurationError(
                    f"channel {idx}: decimation {ch.decimation} does not divide "
                    f"the signal length {self.signal_length}"
                )
            if ch.support_width > self.signal_length // ch.decimation:
                raise ConfigurationError(
                    f"channel {idx} violates the painless condition: "
                    f"{ch.support_width} bins > {self.signal_length // ch.decimation} frames"
                )
        unity = np.zeros(self.num_bins)
        for ch, dual, weight in zip(self.channels, self.dual_responses, self.frame_weights):
            first, last = ch.support
            unity[first : last + 1] += (weight / ch.decimation) * ch.freq_response * dual
        if np.max(np.abs(unity - 1.0)) > 1e-10:
            raise NonInvertibleFrameError("dual filters do not resolve the identity")


def _hann_bump(distance: np.ndarray) -> np.ndarray:
    """Prototype window on the warped axis: cos^2 bump supported on (-1, 1)."""
    out = np.zeros_like(distance)
    inside = np.abs(distance) < 1.0
    out[inside] = np.cos(0.5 * np.pi * distance[inside]) ** 2
    return out


def _pick_decimation(signal_length: int, full_width: int, redundancy: float) -> int:
    bound = signal_length / (full_width * redundancy)
    if bound < 1.0:
        raise ConfigurationError(
            f"redundancy {redundancy} is infeasible for this geometry; "
            f"the widest channel admits at most {signal_length / full_width:.2f}"
        )
    a = 2 ** int(np.floor(np.log2(bound)))
    while a > 1 and signal_length % a:
        a //= 2
    return a


def build_filterbank(
    warping: WarpingFunction,
    num_channels: int,
    signal_length: int,
    sample_rate: int,
    redundancy: float = 2.0,
) -> FilterbankSpec:
    """Construct a perfect-reconstruction filterbank from a warping.

    Parameters
    ----------
    warping : WarpingFunction
        Any strictly increasing warping; it is affinely rescaled so that
        0 Hz maps to 0 and Nyquist to ``num_channels``.
    num_channels : int
        Number of warped unit steps across the band; the bank carries
        this many channels plus one pinned at Nyquist.
    signal_length : int
        Even number of samples the bank analyzes (callers pad).
    sample_rate : int
        Sampling rate in Hz.
    redundancy : float
        Requested minimum oversampling per channel, >= 1. Decimations
        are powers of two dividing ``signal_length``, so the achieved
        redundancy can exceed the request.
    """
    if num_channels < 2:
        raise ConfigurationError("num_channels must be >= 2")
    if redundancy < 1.0:
        raise ConfigurationError("redundancy must be >= 1")
    if signal_length < 2 or signal_length % 2:
        raise ConfigurationError("signal_length must be even and >= 2")
    if sample_rate <= 0:
        raise ConfigurationError("sample_rate must be positive")

    nyquist = sample_rate / 2.0
    num_bins = signal_length // 2 + 1
    freqs = np.arange(num_bins) * (sample_rate / signal_length)

    raw = np.asarray(warping.warp(freqs), dtype=np.float64)
    if raw.shape != freqs.shape or np.any(np.diff(raw) <= 0):
        raise ConfigurationError(
            "warping must be strictly increasing over [0, Nyquist]"
        )
    raw0 = float(raw[0])
    span = float(raw[-1]) - raw0
    xi = (raw - raw0) * (num_channels / span)
    xi[-1] = float(num_channels)  # pin the endpoint against rounding

    channels = []
    weights = []
    for w in range(num_channels + 1):
        inside = np.flatnonzero(np.abs(xi - w) < 1.0)
        if inside.size == 0:
            raise ConfigurationError(
                f"channel {w} covers no DFT bin; reduce num_channels or "
                f"increase signal_length"
            )
        first, last = int(inside[0]), int(inside[-1])
        response = _hann_bump(xi[first : last + 1] - w)

        edge = w == 0 or w == num_channels
        stored = last - first + 1
        full_width = 2 * stored - 1 if edge else stored
        decimation = _pick_decimation(signal_length, full_width, redundancy)

        lo = warping.unwarp(raw0 + max(w - 1, 0) * span / num_channels)
        hi = warping.unwarp(raw0 + min(w + 1, num_channels) * span / num_channels)
        center = warping.unwarp(raw0 + w * span / num_channels)
        if w == 0:
            center = 0.0
        elif w == num_channels:
            center = nyquist

        channels.append(
            WfbfChannel(
                center_hz=float(center),
                freq_response=response,
                support=(first, last),
                decimation=decimation,
                bandwidth_hz=float(hi - lo),
            )
        )
        weights.append(1.0 if edge else 2.0)

    diag = np.zeros(num_bins)
    for ch, weight in zip(channels, weights):
        first, last = ch.support
        diag[first : last + 1] += (weight / ch.decimation) * ch.freq_response**2
    if np.min(diag) <= _FRAME_FLOOR:
        raise NonInvertibleFrameError(
            f"frame operator reaches {np.min(diag):.3e} at bin {int(np.argmin(diag))}"
        )

    duals = []
    for ch in channels:
        first, last = ch.support
        duals.append(ch.freq_response / diag[first : last + 1])

    return FilterbankSpec(
        channels=tuple(channels),
        dual_responses=tuple(duals),
        frame_weights=tuple(weights),
        signal_length=signal_length,
        sample_rate=sample_rate,
        warping=warping,
        num_channels=num_channels,
        redundancy=float(redundancy),
    )


def wfbf_analyze(signal: TimeSignal, fb: FilterbankSpec) -> TfCoefficients:
    """Bandpass, decimate, and collect the subband streams.

    Channel ``w`` holds the inverse DFT, at ``signal_length /
    decimation`` points, of the signal spectrum multiplied by the
    channel response; this equals the decimated output of the
    corresponding modulated bandpass filter.
    """
    if len(signal) != fb.signal_length:
        raise InvalidInputError(
            f"signal has {len(signal)} samples, filterbank expects {fb.signal_length}"
        )
    spectrum = np.fft.rfft(signal.samples)

    streams = []
    rates = []
    for ch in fb.channels:
        first, last = ch.support
        frames = fb.signal_length // ch.decimation
        folded = np.zeros(frames, dtype=np.complex128)
        idx = np.arange(first, last + 1) % frames
        folded[idx] = spectrum[first : last + 1] * ch.freq_response
        streams.append(np.fft.ifft(folded) / ch.decimation)
        rates.append(signal.sample_rate / ch.decimation)

    return TfCoefficients(
        channels=tuple(streams),
        channel_rates=tuple(rates),
        layout=fb,
        signal_length=fb.signal_length,
    )


def wfbf_synthesize(coeffs: TfCoefficients, fb: FilterbankSpec) -> TimeSignal:
    """Invert :func:`wfbf_analyze` through the dual filters.

    Each channel's decimated stream is transformed back to the DFT
    domain, unfolded onto the channel support (exact under the painless
    condition), weighted by the dual response and the channel frame
    weight, and accumulated; the negative-frequency half follows by
    conjugate symmetry.
    """
    expected = tuple(fb.signal_length // ch.decimation for ch in fb.channels)
    if coeffs.num_channels != len(fb.channels) or coeffs.frame_counts != expected:
        raise InvalidInputError("coefficient layout does not match the filterbank")
    if coeffs.signal_length != fb.signal_length:
        raise InvalidInputError("coefficient signal length does not match")

    spectrum = np.zeros(fb.num_bins, dtype=np.complex128)
    for ch, dual, weight, stream in zip(
        fb.channels, fb.dual_responses, fb.frame_weights, coeffs.channels
    ):
        first, last = ch.support
        frames = fb.signal_length // ch.decimation
        unfolded = np.fft.fft(stream)[np.arange(first, last + 1) % frames]
        spectrum[first : last + 1] += weight * dual * unfolded

    samples = np.fft.irfft(spectrum, n=fb.signal_length)
    return TimeSignal(samples=samples, sample_rate=fb.sample_rate)


def export_frequency_response(fb: FilterbankSpec) -> np.ndarray:
    """Magnitude responses on the DFT bin grid.

    Returns an array of shape ``(num_bins, len(channels) + 1)``: column
    0 is frequency in Hz, column ``w + 1`` the magnitude response of
    channel ``w`` (zero outside its support).
    """
    table = np.zeros((fb.num_bins, len(fb.channels) + 1))
    table[:, 0] = np.arange(fb.num_bins) * fb.bin_hz
    for w, ch in enumerate(fb.channels):
        first, last = ch.support
        table[first : last + 1, w + 1] = ch.freq_response
    return table


def filterbank_to_dict(fb: FilterbankSpec) -> dict:
    return {
        "version": FORMAT_VERSION,
        "sample_rate": fb.sample_rate,
        "signal_length": fb.signal_length,
        "num_channels": fb.num_channels,
        "redundancy": fb.redundancy,
        "warping": fb.warping.to_dict(),
        "channels": [
            {
                "center_hz": ch.center_hz,
                "decimation": ch.decimation,
                "support": [ch.support[0], ch.support[1]],
                "response_values": [float(v) for v in ch.freq_response],
            }
            for ch in fb.channels
        ],
    }


def filterbank_from_dict(data: dict) -> FilterbankSpec:
    """Rebuild a spec from its serialized form, recomputing the duals."""
    if data.get("version") != FORMAT_VERSION:
        raise ConfigurationError(f"unsupported filterbank file version: {data.get('version')!r}")
    warping = warping_from_dict(data["warping"])
    num_channels = int(data["num_channels"])
    signal_length = int(data["signal_length"])
    num_bins = signal_length // 2 + 1

    raw_channels = data["channels"]
    if len(raw_channels) != num_channels + 1:
        raise InvalidInputError("channel list does not match num_channels + 1")

    raw0 = float(np.asarray(warping.warp(0.0)))
    span = float(np.asarray(warping.warp(data["sample_rate"] / 2.0))) - raw0

    channels = []
    weights = []
    for w, entry in enumerate(raw_channels):
        first, last = (int(v) for v in entry["support"])
        lo = warping.unwarp(raw0 + max(w - 1, 0) * span / num_channels)
        hi = warping.unwarp(raw0 + min(w + 1, num_channels) * span / num_channels)
        channels.append(
            WfbfChannel(
                center_hz=float(entry["center_hz"]),
                freq_response=np.asarray(entry["response_values"], dtype=np.float64),
                support=(first, last),
                decimation=int(entry["decimation"]),
                bandwidth_hz=float(hi - lo),
            )
        )
        weights.append(1.0 if w in (0, num_channels) else 2.0)

    diag = np.zeros(num_bins)
    for ch, weight in zip(channels, weights):
        first, last = ch.support
        diag[first : last + 1] += (weight / ch.decimation) * ch.freq_response**2
    if np.min(diag) <= _FRAME_FLOOR:
        raise NonInvertibleFrameError("serialized filterbank has a singular frame operator")
    duals = [
        ch.freq_response / diag[ch.support[0] : ch.support[1] + 1] for ch in channels
    ]

    fb = FilterbankSpec(
        channels=tuple(channels),
        dual_responses=tuple(duals),
        frame_weights=tuple(weights),
        signal_length=signal_length,
        sample_rate=int(data["sample_rate"]),
        warping=warping,
        num_channels=num_channels,
        redundancy=float(data["redundancy"]),
    )
    fb.validate()
    return fb


def save_filterbank(fb: FilterbankSpec, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(filterbank_to_dict(fb), fh, indent=1)
        fh.write("\n")


def load_filterbank(path) -> FilterbankSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return filterbank_from_dict(json.load(fh))
