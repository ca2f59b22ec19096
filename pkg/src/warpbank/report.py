"""Delimited outputs and the figures rendered alongside them.

All CSV values are written with ``repr`` so identical runs produce
byte-identical files. Figures are rendered headlessly to PNG next to
the delimited data they illustrate.
"""

from __future__ import annotations

import json

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .features import FeatureMatrix
from .filterbank import FilterbankSpec, export_frequency_response


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_ragged_csv(path, rows) -> None:
    """Rows of possibly different lengths (channels x frames matrices)."""
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_json(path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")


def write_response_csv(path, fb: FilterbankSpec) -> None:
    """Column 0: frequency Hz; column w+1: magnitude response of channel w."""
    table = export_frequency_response(fb)
    header = ["frequency_hz"] + [f"channel_{w}" for w in range(len(fb.channels))]
    write_csv(path, header, table)


def write_curve_csv(path, x_name: str, y_name: str, x, y) -> None:
    write_csv(path, [x_name, y_name], zip(x, y))


def write_feature_csv(path, features: FeatureMatrix) -> None:
    """Feature rows (feature_dim x frames), one CSV row per feature."""
    header = [features.domain_tag] + [
        f"frame_{k}" for k in range(features.values.shape[1])
    ]
    write_csv(
        path,
        header,
        ([f"dim_{d}", *row] for d, row in enumerate(features.values)),
    )


def plot_frequency_response(path, fb: FilterbankSpec, title: str = "Channel responses") -> None:
    table = export_frequency_response(fb)
    fig, ax = plt.subplots(figsize=(9, 4))
    for w in range(1, table.shape[1]):
        ax.plot(table[:, 0], table[:, w], lw=0.8)
    ax.set_xlabel("Frequency (Hz)")
    ax.set_ylabel("Magnitude")
    ax.set_title(title)
    ax.set_xlim(0, table[-1, 0])
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_design(
    path,
    psd_freqs: np.ndarray,
    psd_values: np.ndarray,
    warp_freqs: np.ndarray,
    warp_values: np.ndarray,
    variance_channels: np.ndarray | None = None,
    variance_values: np.ndarray | None = None,
) -> None:
    """Residual PSD, the warping built from it, and optionally the
    per-channel residual variance it is meant to flatten."""
    panels = 3 if variance_values is not None else 2
    fig, axes = plt.subplots(1, panels, figsize=(4.5 * panels, 3.6))

    axes[0].semilogy(psd_freqs, np.maximum(psd_values, 1e-300))
    axes[0].set_xlabel("Frequency (Hz)")
    axes[0].set_ylabel("Residual PSD")
    axes[0].set_title("Masking-residual PSD")

    span = warp_values[-1] - warp_values[0]
    axes[1].plot(warp_freqs, (warp_values - warp_values[0]) / span)
    axes[1].plot(warp_freqs, warp_freqs / warp_freqs[-1], "--", lw=0.8, label="linear")
    axes[1].set_xlabel("Frequency (Hz)")
    axes[1].set_ylabel("Warped coordinate (rescaled)")
    axes[1].set_title("Designed warping")
    axes[1].legend()

    if variance_values is not None:
        axes[2].semilogy(variance_channels, np.maximum(variance_values, 1e-300))
        axes[2].set_xlabel("Channel")
        axes[2].set_ylabel("Residual variance")
        axes[2].set_title("Per-channel residual variance")

    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_eval(path, summaries: list[dict]) -> None:
    """Mean output SDR per condition, grouped by input SNR."""
    fig, ax = plt.subplots(figsize=(8, 4))
    snrs = sorted({s["condition"]["snr_db"] for s in summaries})
    labels = sorted(
        {f"{s['condition']['transform']}-{s['condition']['num_channels']}" for s in summaries}
    )
    width = 0.8 / max(len(labels), 1)
    for i, label in enumerate(labels):
        values = []
        for snr in snrs:
            match = [
                s
                for s in summaries
                if s["condition"]["snr_db"] == snr
                and f"{s['condition']['transform']}-{s['condition']['num_channels']}" == label
            ]
            values.append(match[0]["mean_output_sdr_db"] if match else np.nan)
        positions = np.arange(len(snrs)) + (i - (len(labels) - 1) / 2) * width
        ax.bar(positions, values, width=width, label=label)
    ax.set_xticks(np.arange(len(snrs)))
    ax.set_xticklabels([str(s) for s in snrs])
    ax.set_xlabel("Input SNR (dB)")
    ax.set_ylabel("Mean output SDR (dB)")
    ax.set_title("Enhancement results")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
