"""Command-line frontend.

One subcommand per pipeline stage so every intermediate artifact
(fixtures, warping, filterbank) lands on disk and can be inspected or
reused:

    synth     render synthetic clean/noise fixtures and a manifest
    design    learn a warping from a manifest's oracle masking residual
    fbgen     build a perfect-reconstruction filterbank from a warping
    response  export a filterbank's frequency responses
    enhance   mask a manifest's mixtures in one transform domain
    eval      compare transforms across input SNRs

Every run writes ``<subcommand>_record.json`` (resolved configuration
plus package version) beside its outputs. Exit codes: 0 success, 2
validation error, 1 runtime error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .audio_io import read_wav
from .dataset import DatasetManifest, synth_fixtures
from .design import (
    DesignConfig,
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
    WarpbankError,
)
from .evaluate import run_enhancement
from .features import log_magnitude
from .filterbank import (
    FilterbankSpec,
    build_filterbank,
    load_filterbank,
    save_filterbank,
    wfbf_analyze,
)
from .masking import OnesEstimator, psm_oracle, wiener_baseline_estimator
from .report import (
    plot_design,
    plot_eval,
    plot_frequency_response,
    write_csv,
    write_curve_csv,
    write_json,
    write_ragged_csv,
    write_response_csv,
)
from .signals import TimeSignal, mix_at_snr
from .stft import StftParams, stft_analyze, stft_synthesize
from .warping import warping_from_dict, warping_stft, warping_wavelet


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="warpbank",
        description="Design, build, and evaluate warped perfect-reconstruction filterbanks.",
    )
    parser.add_argument("--version", action="version", version=f"warpbank {__version__}")
    parser.add_argument("-o", "--output-dir", default=".", help="directory for all outputs")
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized stages")
    parser.add_argument(
        "--threads",
        type=_positive_int,
        default=None,
        help="worker threads (default: WARPBANK_THREADS or 1)",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0)
    parser.add_argument("--no-plot", action="store_true", help="skip figure rendering")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate synthetic clean/noise fixtures")
    p.add_argument("--count", type=_positive_int, default=10)
    p.add_argument("--rate", type=_positive_int, default=16000)
    p.add_argument("--duration", type=float, default=2.0)
    p.add_argument("--snr", type=float, default=0.0, help="mixing SNR stored per entry")

    p = sub.add_parser("design", help="learn a warping from oracle masking residuals")
    p.add_argument("--manifest", required=True)
    p.add_argument("--fft-size", type=_positive_int, default=512)
    p.add_argument("--hop", type=_positive_int, default=256)
    p.add_argument(
        "--lambda",
        dest="regularization",
        type=float,
        default=0.1,
        help="regularization added to the unit-mean residual PSD",
    )
    p.add_argument("--channels", type=_positive_int, default=64)
    p.add_argument("--welch-segment", type=_positive_int, default=512)
    p.add_argument("--welch-overlap", type=float, default=0.5)

    p = sub.add_parser("fbgen", help="build a filterbank from a warping")
    p.add_argument(
        "--warp",
        required=True,
        help="'linear', 'wavelet', or the path of a warping/filterbank JSON file",
    )
    p.add_argument("--channels", type=_positive_int, default=64)
    p.add_argument("--length", type=_positive_int, default=32000)
    p.add_argument("--rate", type=_positive_int, default=16000)
    p.add_argument("--redundancy", type=float, default=2.0)
    p.add_argument("--base", type=float, default=2.0, help="wavelet log base")
    p.add_argument("--fmin", type=float, default=100.0, help="wavelet linearization corner (Hz)")
    p.add_argument("--out", default="filterbank.json", help="output file name")

    p = sub.add_parser("response", help="export filterbank frequency responses")
    p.add_argument("--fb", required=True)

    p = sub.add_parser("enhance", help="mask and resynthesize a manifest's mixtures")
    p.add_argument("--manifest", required=True)
    p.add_argument("--fb", help="filterbank JSON (default: uniform STFT)")
    p.add_argument("--fft-size", type=_positive_int, default=512)
    p.add_argument("--hop", type=_positive_int, default=256)
    p.add_argument("--mask", choices=["oracle", "ones", "wiener"], default="oracle")
    p.add_argument("--noise-frames", type=_positive_int, default=10)
    p.add_argument("--snr", type=float, default=None, help="override the manifest SNRs")
    p.add_argument("--save-audio", action="store_true")
    p.add_argument("--export-masks", action="store_true")
    p.add_argument(
        "--sum-cost",
        action="store_true",
        help="report summed rather than per-bin-averaged masking cost",
    )

    p = sub.add_parser("eval", help="compare transforms across input SNRs")
    p.add_argument("--manifest", required=True)
    p.add_argument("--snrs", default="-6,0,6", help="comma-separated input SNRs in dB")
    p.add_argument("--fb", action="append", default=[], help="filterbank JSON (repeatable)")
    p.add_argument("--stft-size", type=_positive_int, default=512)
    p.add_argument("--hop", type=_positive_int, default=256)
    p.add_argument("--no-stft", action="store_true", help="skip the uniform STFT condition")
    p.add_argument("--mask", choices=["oracle", "ones", "wiener"], default="oracle")
    p.add_argument("--noise-frames", type=_positive_int, default=10)
    return parser


def _resolve_threads(args) -> int:
    if args.threads is not None:
        return args.threads
    env = os.environ.get("WARPBANK_THREADS", "")
    return int(env) if env.isdigit() and int(env) >= 1 else 1


def _write_record(args, out_dir: str) -> None:
    config = {k: v for k, v in sorted(vars(args).items()) if k != "command"}
    config["threads"] = _resolve_threads(args)
    write_json(
        os.path.join(out_dir, f"{args.command}_record.json"),
        {"command": args.command, "config": config, "version": __version__},
    )


def _mask_source(args):
    if args.mask == "oracle":
        return None, True
    if args.mask == "ones":
        return OnesEstimator(), False
    return wiener_baseline_estimator(args.noise_frames), False


def _cmd_synth(args, out_dir: str) -> int:
    manifest = synth_fixtures(
        count=args.count,
        seed=args.seed,
        sample_rate=args.rate,
        duration=args.duration,
        out_dir=out_dir,
        snr_db=args.snr,
    )
    manifest.save(os.path.join(out_dir, "manifest.json"))
    print(f"wrote {len(manifest)} fixture pairs to {out_dir}")
    return 0


def _cmd_design(args, out_dir: str) -> int:
    manifest = DatasetManifest.load(args.manifest)
    params = StftParams.hann(args.fft_size, args.hop)
    cfg = DesignConfig(
        regularization=args.regularization,
        stft_params=params,
        welch=WelchSettings(segment_length=args.welch_segment, overlap=args.welch_overlap),
        num_channels=args.channels,
    )

    errors = []
    error_chunks = []
    for entry in manifest.entries:
        clean = read_wav(entry.clean_path)
        noise = read_wav(entry.noise_path)
        if len(noise) > len(clean):
            noise = TimeSignal(noise.samples[: len(clean)], noise.sample_rate)
        mixture, _ = mix_at_snr(clean, noise, entry.snr_db)
        residual = oracle_error(stft_analyze(clean, params), stft_analyze(mixture, params))
        errors.append(residual)
        error_chunks.append(stft_synthesize(residual, params, len(clean)).samples)

    error_signal = TimeSignal(np.concatenate(error_chunks), manifest.sample_rate)
    psd = welch_psd(error_signal, cfg)
    warp = design_warping(psd, args.regularization, args.channels)
    weights = compute_weights(errors)
    variances = band_error_variance(errors)

    write_json(os.path.join(out_dir, "warping.json"), warp.to_dict())
    write_curve_csv(
        os.path.join(out_dir, "error_psd.csv"), "frequency_hz", "psd",
        psd.frequencies, psd.sigma,
    )
    bin_freqs = np.arange(params.num_bins) * manifest.sample_rate / params.fft_size
    write_curve_csv(
        os.path.join(out_dir, "weights.csv"), "frequency_hz", "weight",
        bin_freqs, weights.weights,
    )
    write_curve_csv(
        os.path.join(out_dir, "band_variance.csv"), "frequency_hz", "variance",
        bin_freqs, variances,
    )
    if not args.no_plot:
        plot_design(
            os.path.join(out_dir, "design.png"),
            psd.frequencies, psd.sigma,
            warp.breakpoints[:, 0], warp.breakpoints[:, 1],
            bin_freqs, variances,
        )
    print(
        f"designed warping from {len(manifest)} utterances "
        f"({psd.num_segments} Welch segments, lambda={args.regularization})"
    )
    return 0


def _load_warping_file(path):
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    # accept either a bare warping or a full filterbank file
    return warping_from_dict(data.get("warping", data))


def _cmd_fbgen(args, out_dir: str) -> int:
    if args.warp == "linear":
        warping = warping_stft(1.0)
    elif args.warp == "wavelet":
        warping = warping_wavelet(args.base, args.fmin)
    else:
        warping = _load_warping_file(args.warp)
    fb = build_filterbank(
        warping=warping,
        num_channels=args.channels,
        signal_length=args.length,
        sample_rate=args.rate,
        redundancy=args.redundancy,
    )
    out_path = os.path.join(out_dir, args.out)
    save_filterbank(fb, out_path)
    print(
        f"built {len(fb.channels)}-channel ({fb.warping.kind}) filterbank, "
        f"achieved redundancy {fb.achieved_redundancy:.3f} -> {out_path}"
    )
    return 0


def _cmd_response(args, out_dir: str) -> int:
    fb = load_filterbank(args.fb)
    write_response_csv(os.path.join(out_dir, "response.csv"), fb)
    if not args.no_plot:
        plot_frequency_response(
            os.path.join(out_dir, "response.png"),
            fb,
            title=f"{fb.warping.kind} warping, {fb.num_channels} channels",
        )
    print(f"exported responses of {len(fb.channels)} channels")
    return 0


def _cmd_enhance(args, out_dir: str) -> int:
    manifest = DatasetManifest.load(args.manifest)
    if args.snr is not None:
        manifest = manifest.with_snr(args.snr)
    transform = load_filterbank(args.fb) if args.fb else StftParams.hann(args.fft_size, args.hop)
    estimator, oracle = _mask_source(args)

    result = run_enhancement(
        manifest,
        transform,
        estimator=estimator,
        oracle=oracle,
        workers=_resolve_threads(args),
        save_audio_dir=out_dir if args.save_audio else None,
        cost_mode="sum" if args.sum_cost else "mean",
    )
    if args.export_masks:
        _export_masks(manifest, transform, estimator, oracle, out_dir)

    def opt(value):
        return value if value is not None else ""

    write_csv(
        os.path.join(out_dir, "enhance_results.csv"),
        ["index", "clean_path", "input_sdr_db", "output_sdr_db", "mask_cost", "error"],
        [
            (u.index, u.clean_path, opt(u.input_sdr_db), opt(u.output_sdr_db),
             opt(u.mask_cost), u.error or "")
            for u in result.per_utterance
        ],
    )
    write_json(os.path.join(out_dir, "enhance_summary.json"), result.summary())
    print(
        f"{result.condition['transform']} + {result.condition['estimator']}: "
        f"SDR {result.mean_input_sdr_db:.2f} -> {result.mean_output_sdr_db:.2f} dB "
        f"({result.num_failed} failures)"
    )
    return 0


def _export_masks(manifest, transform, estimator, oracle, out_dir: str) -> None:
    for index, entry in enumerate(manifest.entries):
        clean = read_wav(entry.clean_path)
        noise = read_wav(entry.noise_path)
        if len(noise) > len(clean):
            noise = TimeSignal(noise.samples[: len(clean)], noise.sample_rate)
        mixture, _ = mix_at_snr(clean, noise, entry.snr_db)
        if isinstance(transform, FilterbankSpec):
            pad = np.zeros(transform.signal_length)
            pad[: len(mixture)] = mixture.samples
            noisy = wfbf_analyze(TimeSignal(pad, mixture.sample_rate), transform)
            pad_c = np.zeros(transform.signal_length)
            pad_c[: len(clean)] = clean.samples
            clean_c = wfbf_analyze(TimeSignal(pad_c, clean.sample_rate), transform)
        else:
            noisy = stft_analyze(mixture, transform)
            clean_c = stft_analyze(clean, transform)
        mask = psm_oracle(clean_c, noisy) if oracle else estimator.estimate(
            log_magnitude(noisy), noisy
        )
        write_ragged_csv(os.path.join(out_dir, f"mask_{index:03d}.csv"), mask.channels)


def _cmd_eval(args, out_dir: str) -> int:
    manifest = DatasetManifest.load(args.manifest)
    snrs = [float(s) for s in args.snrs.split(",") if s.strip()]
    if not snrs:
        raise ConfigurationError("--snrs needs at least one value")

    transforms = []
    if not args.no_stft:
        transforms.append(StftParams.hann(args.stft_size, args.hop))
    transforms.extend(load_filterbank(path) for path in args.fb)
    if not transforms:
        raise ConfigurationError("nothing to evaluate: STFT disabled and no --fb given")
    estimator, oracle = _mask_source(args)

    summaries = []
    detail_rows = []
    for snr in snrs:
        leveled = manifest.with_snr(snr)
        for transform in transforms:
            result = run_enhancement(
                leveled, transform, estimator=estimator, oracle=oracle,
                workers=_resolve_threads(args),
            )
            summaries.append(result.summary())
            for u in result.per_utterance:
                detail_rows.append(
                    (
                        snr,
                        result.condition["transform"],
                        result.condition["num_channels"],
                        u.index,
                        u.input_sdr_db if u.input_sdr_db is not None else "",
                        u.output_sdr_db if u.output_sdr_db is not None else "",
                        u.error or "",
                    )
                )

    write_csv(
        os.path.join(out_dir, "eval_table.csv"),
        [
            "snr_db", "transform", "num_channels", "estimator",
            "mean_input_sdr_db", "mean_output_sdr_db", "std_output_sdr_db",
        ],
        [
            (
                s["condition"]["snr_db"], s["condition"]["transform"],
                s["condition"]["num_channels"], s["condition"]["estimator"],
                s["mean_input_sdr_db"], s["mean_output_sdr_db"], s["std_output_sdr_db"],
            )
            for s in summaries
        ],
    )
    write_csv(
        os.path.join(out_dir, "eval_utterances.csv"),
        ["snr_db", "transform", "num_channels", "index", "input_sdr_db", "output_sdr_db", "error"],
        detail_rows,
    )
    write_json(os.path.join(out_dir, "eval_summary.json"), {"conditions": summaries})
    if not args.no_plot:
        plot_eval(os.path.join(out_dir, "eval_sdr.png"), summaries)
    for s in summaries:
        cond = s["condition"]
        print(
            f"snr {cond['snr_db']:>5} dB  {cond['transform']}-{cond['num_channels']}: "
            f"{s['mean_input_sdr_db']:6.2f} -> {s['mean_output_sdr_db']:6.2f} dB"
        )
    return 0


_HANDLERS = {
    "synth": _cmd_synth,
    "design": _cmd_design,
    "fbgen": _cmd_fbgen,
    "response": _cmd_response,
    "enhance": _cmd_enhance,
    "eval": _cmd_eval,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    out_dir = args.output_dir
    try:
        os.makedirs(out_dir, exist_ok=True)
        _write_record(args, out_dir)
        return _HANDLERS[args.command](args, out_dir)
    except (ConfigurationError, InvalidInputError, DegenerateInputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (WarpbankError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
