"""Frequency-warping functions.

A warping function maps linear frequency (Hz) onto a warped coordinate;
its inverse places filterbank channel centers. All warpings here are
strictly increasing on the frequency range they are used over and expose
``warp``/``unwarp`` as mutual inverses.
"""

from __future__ import annotations

import abc
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, InvalidInputError


class WarpingFunction(abc.ABC):
    """Strictly increasing map between frequency in Hz and a warped axis."""

    kind: str

    @abc.abstractmethod
    def warp(self, freq_hz):
        """Warped coordinate of a frequency (scalar or ndarray)."""

    @abc.abstractmethod
    def unwarp(self, xi):
        """Frequency in Hz of a warped coordinate (scalar or ndarray)."""

    @abc.abstractmethod
    def to_dict(self) -> dict:
        """JSON-ready description, invertible via :func:`warping_from_dict`."""


@dataclass(frozen=True)
class LinearWarping(WarpingFunction):
    """Proportional warping ``xi = slope * f``; yields uniform filterbanks."""

    slope: float = 1.0
    kind: str = field(default="linear", init=False, repr=False)

    def __post_init__(self) -> None:
        if not (self.slope > 0.0 and np.isfinite(self.slope)):
            raise ConfigurationError("linear warping needs a positive finite slope")

    def warp(self, freq_hz):
        return self.slope * np.asarray(freq_hz, dtype=np.float64)[()]

    def unwarp(self, xi):
        return np.asarray(xi, dtype=np.float64)[()] / self.slope

    def to_dict(self) -> dict:
        return {"kind": "linear", "slope": self.slope, "lambda": None}


@dataclass(frozen=True)
class LogarithmicWarping(WarpingFunction):
    """Logarithmic warping ``xi = log_base(f)`` above ``f_min``.

    ``log_base`` diverges at zero, so below ``f_min`` the map continues
    linearly with the slope it has at ``f_min`` (a C1 splice). Above
    ``f_min`` equal warped steps correspond to equal frequency ratios,
    which is what makes the resulting filterbank wavelet-like.
    """

    base: float
    f_min: float
    kind: str = field(default="logarithmic", init=False, repr=False)

    def __post_init__(self) -> None:
        if not (self.base > 1.0 and np.isfinite(self.base)):
            raise ConfigurationError("logarithmic warping needs base > 1")
        if not (self.f_min > 0.0 and np.isfinite(self.f_min)):
            raise ConfigurationError("logarithmic warping needs f_min > 0")

    @property
    def _xi_min(self) -> float:
        return float(np.log(self.f_min) / np.log(self.base))

    @property
    def _slope_at_min(self) -> float:
        return 1.0 / (self.f_min * np.log(self.base))

    def warp(self, freq_hz):
        f = np.asarray(freq_hz, dtype=np.float64)
        log_part = np.log(np.maximum(f, self.f_min)) / np.log(self.base)
        lin_part = self._xi_min + self._slope_at_min * (f - self.f_min)
        return np.where(f >= self.f_min, log_part, lin_part)[()]

    def unwarp(self, xi):
        x = np.asarray(xi, dtype=np.float64)
        xi_min = self._xi_min
        log_part = np.power(self.base, np.minimum(x, 700.0))
        lin_part = self.f_min + (x - xi_min) / self._slope_at_min
        return np.where(x >= xi_min, log_part, lin_part)[()]

    def to_dict(self) -> dict:
        return {
            "kind": "logarithmic",
            "base": self.base,
            "f_min": self.f_min,
            "lambda": None,
        }


def _interp_with_extrapolation(x, xp: np.ndarray, fp: np.ndarray):
    """Piecewise-linear interpolation, extended with the edge slopes."""
    x_arr = np.asarray(x, dtype=np.float64)
    out = np.interp(x_arr, xp, fp)
    lo_slope = (fp[1] - fp[0]) / (xp[1] - xp[0])
    hi_slope = (fp[-1] - fp[-2]) / (xp[-1] - xp[-2])
    out = np.where(x_arr < xp[0], fp[0] + (x_arr - xp[0]) * lo_slope, out)
    out = np.where(x_arr > xp[-1], fp[-1] + (x_arr - xp[-1]) * hi_slope, out)
    return out[()]


@dataclass(frozen=True, eq=False)
class TabulatedWarping(WarpingFunction):
    """Warping given by sorted (frequency Hz, warped coordinate) breakpoints.

    Evaluation interpolates linearly between breakpoints and extends the
    edge segments beyond them. Produced by the data-driven designer;
    ``regularization`` and ``normalization`` record how the breakpoints
    were obtained.
    """

    breakpoints: np.ndarray
    regularization: float | None = None
    normalization: dict | None = None
    kind: str = field(default="tabulated", init=False, repr=False)

    def __post_init__(self) -> None:
        pts = np.asarray(self.breakpoints, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
            raise InvalidInputError("breakpoints must be an (n >= 2, 2) table")
        if not np.all(np.isfinite(pts)):
            raise InvalidInputError("breakpoints contain non-finite values")
        if np.any(np.diff(pts[:, 0]) <= 0) or np.any(np.diff(pts[:, 1]) <= 0):
            raise InvalidInputError(
                "breakpoints must increase strictly in both coordinates"
            )
        pts = np.ascontiguousarray(pts)
        pts.flags.writeable = False
        object.__setattr__(self, "breakpoints", pts)

    def warp(self, freq_hz):
        return _interp_with_extrapolation(
            freq_hz, self.breakpoints[:, 0], self.breakpoints[:, 1]
        )

    def unwarp(self, xi):
        return _interp_with_extrapolation(
            xi, self.breakpoints[:, 1], self.breakpoints[:, 0]
        )

    def to_dict(self) -> dict:
        return {
            "kind": "tabulated",
            "breakpoints": [[float(f), float(x)] for f, x in self.breakpoints],
            "lambda": self.regularization,
            "normalization": self.normalization,
        }


def warping_stft(b: float) -> LinearWarping:
    """Linear warping ``xi = f / b``; the uniform (STFT-like) special case."""
    if not (b > 0.0 and np.isfinite(b)):
        raise ConfigurationError("frequency step b must be positive")
    return LinearWarping(slope=1.0 / b)


def warping_wavelet(c: float, f_min: float) -> LogarithmicWarping:
    """Logarithmic warping ``xi = log_c(f)``, linearized below ``f_min``."""
    if not (c > 1.0 and np.isfinite(c)):
        raise ConfigurationError("logarithm base c must exceed 1")
    return LogarithmicWarping(base=c, f_min=f_min)


def warping_from_dict(data: dict) -> WarpingFunction:
    """Rebuild a warping from its :meth:`WarpingFunction.to_dict` form."""
    kind = data.get("kind")
    if kind == "linear":
        return LinearWarping(slope=float(data["slope"]))
    if kind == "logarithmic":
        return LogarithmicWarping(base=float(data["base"]), f_min=float(data["f_min"]))
    if kind == "tabulated":
        return TabulatedWarping(
            breakpoints=np.asarray(data["breakpoints"], dtype=np.float64),
            regularization=data.get("lambda"),
            normalization=data.get("normalization"),
        )
    raise ConfigurationError(f"unknown warping kind: {kind!r}")
