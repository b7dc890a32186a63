"""Command-line front end.

Exit codes: 0 success, 2 I/O failure, 3 invalid configuration or arguments,
4 no usable impulses. A ``<output>.manifest`` key-value file is written next
to every output on success.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time
from importlib import metadata
from pathlib import Path

import numpy as np

from .audio_io.metrics import metrics as compute_metrics
from .audio_io.synth import synth_impulse_train, synth_speech, synth_surrogates
from .audio_io.wav import WavError, WavFile, read_wav, write_wav
from .framing import FrameConfig
from .profiles import BUILTIN_CLICK, load_profile
from .regularity import (
    DEFAULT_RADIUS,
    containing_block,
    decay_profile,
    learn_impulse_profile,
    lipschitz_slope,
    pick_impulse_centers,
)
from .suppression import DenoiseConfig, denoise_signal
from .wavelet import DEFAULT_DEPTH, daubechies, forward_dwt

EXIT_OK, EXIT_IO, EXIT_CONFIG, EXIT_NO_IMPULSES = 0, 2, 3, 4
SYNTH_KINDS = ("vowel", "consonant", "impulse", "clicks", "speech")


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


def write_manifest(target, command: str, started: float, /, **fields) -> Path:
    path = Path(f"{target}.manifest")
    lines = [f"command = {command}", f"version = {_version()}"]
    lines += [f"{k} = {v}" for k, v in fields.items()]
    lines.append(f"wall_clock_s = {time.perf_counter() - started:.3f}")
    path.write_text("\n".join(lines) + "\n")
    return path


def _read_input(path) -> WavFile:
    try:
        wav = read_wav(path)
    except (OSError, WavError) as exc:
        raise CliError(EXIT_IO, f"cannot read {path}: {exc}") from None
    if len(wav.samples) == 0:
        raise CliError(EXIT_IO, f"{path}: empty input")
    return wav


def _write_output(path, wav: WavFile) -> None:
    try:
        write_wav(path, wav)
    except (OSError, WavError) as exc:
        raise CliError(EXIT_IO, f"cannot write {path}: {exc}") from None


def _load_config(path) -> DenoiseConfig:
    if path is None:
        return DenoiseConfig()
    try:
        return DenoiseConfig.load(path)
    except OSError as exc:
        raise CliError(EXIT_CONFIG, f"cannot read config {path}: {exc}") from None
    except ValueError as exc:
        raise CliError(EXIT_CONFIG, f"invalid config {path}: {exc}") from None


def _load_profile(spec):
    try:
        return load_profile(spec)
    except OSError as exc:
        raise CliError(EXIT_CONFIG, f"cannot read profile {spec}: {exc}") from None
    except ValueError as exc:
        raise CliError(EXIT_CONFIG, f"invalid profile {spec}: {exc}") from None


def cmd_denoise(args) -> int:
    started = time.perf_counter()
    cfg = _load_config(args.config)
    if args.strict_literal:
        cfg.strict_literal = True
    profile = _load_profile(args.profile)
    if profile.levels < cfg.depth:
        raise CliError(EXIT_CONFIG, "impulse profile does not cover the configured levels")
    wav = _read_input(args.input)
    result = denoise_signal(wav.signal, cfg, profile)
    fmt = args.format or wav.format
    _write_output(args.output, WavFile(result.signal, fmt))
    config_fields = {f"config.{line.partition(' = ')[0]}": line.partition(" = ")[2]
                     for line in cfg.dumps().splitlines()}
    write_manifest(args.output, "denoise", started, input=args.input, output=args.output,
                   profile=args.profile, config_file=args.config or "defaults", format=fmt,
                   blocks=result.blocks, detections=result.detections, **config_fields)
    return EXIT_OK


def cmd_learn_profile(args) -> int:
    started = time.perf_counter()
    wav = _read_input(args.input)
    x = wav.samples
    centers = pick_impulse_centers(x, args.threshold_db, args.min_separation, args.max_segments)
    if not centers:
        raise CliError(EXIT_NO_IMPULSES, "no usable impulses")
    try:
        profile = learn_impulse_profile([(x, c) for c in centers], radius=args.radius)
    except ValueError as exc:
        raise CliError(EXIT_NO_IMPULSES, str(exc)) from None
    try:
        profile.save(args.output)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {args.output}: {exc}") from None
    write_manifest(args.output, "learn-profile", started, input=args.input, output=args.output,
                   threshold_db=args.threshold_db, min_separation=args.min_separation,
                   max_segments=args.max_segments, radius=args.radius,
                   candidates=len(centers), segment_count=profile.segment_count,
                   skipped=profile.skipped)
    return EXIT_OK


def _parse_centers(text: str) -> list[int]:
    try:
        centers = [int(tok) for tok in text.replace(",", " ").split()]
    except ValueError:
        raise CliError(EXIT_CONFIG, f"cannot parse centers {text!r}") from None
    if not centers:
        raise CliError(EXIT_CONFIG, "no centers given")
    return centers


def analyze_rows(x: np.ndarray, centers, radius: int = DEFAULT_RADIUS, depth: int = DEFAULT_DEPTH):
    """One ``(center, normalized magnitudes, slope)`` triple per centre; NaN where undefined."""
    cfg = FrameConfig()
    spec = daubechies(6)
    if len(x) < cfg.block_len:
        x = np.pad(x, (0, cfg.block_len - len(x)))
    rows = []
    for c in centers:
        block, local = containing_block(x, c, cfg.block_len)
        prof = decay_profile(forward_dwt(block, spec, depth), local, radius).normalize()
        mags = prof.magnitude if prof.normalized else np.full(depth, np.nan)
        try:
            slope = lipschitz_slope(mags)
        except ValueError:
            slope = float("nan")
        rows.append((c, mags, slope))
    return rows


def cmd_analyze(args) -> int:
    started = time.perf_counter()
    wav = _read_input(args.input)
    x = wav.samples
    if args.centers == "auto":
        centers = pick_impulse_centers(x, args.threshold_db)
    else:
        centers = _parse_centers(args.centers)
    bad = [c for c in centers if not 0 <= c < len(x)]
    if bad:
        raise CliError(EXIT_CONFIG, f"centers outside the signal: {bad}")
    rows = analyze_rows(x, centers, args.radius)
    try:
        with open(args.output, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["center"] + [f"level_{j}" for j in range(1, DEFAULT_DEPTH + 1)] + ["slope"])
            for c, mags, slope in rows:
                w.writerow([c] + [repr(float(m)) for m in mags] + [repr(slope)])
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {args.output}: {exc}") from None
    write_manifest(args.output, "analyze", started, input=args.input, output=args.output,
                   centers=args.centers, radius=args.radius, rows=len(rows))
    return EXIT_OK


def cmd_synth(args) -> int:
    started = time.perf_counter()
    if args.kind not in SYNTH_KINDS:
        raise CliError(EXIT_CONFIG, f"unknown kind {args.kind!r}; choose from {', '.join(SYNTH_KINDS)}")
    if not args.duration > 0:
        raise CliError(EXIT_CONFIG, "duration must be positive")
    extra = {}
    if args.kind == "clicks":
        sig, centers = synth_impulse_train(args.duration, args.rate, (args.amp_min, args.amp_max),
                                           (args.width_min_ms, args.width_max_ms), args.seed,
                                           args.sample_rate)
        centers_path = Path(f"{args.output}.centers")
        extra = {"rate_hz": args.rate, "clicks": len(centers), "centers_file": centers_path}
    elif args.kind == "speech":
        sig, _ = synth_speech(args.duration, args.seed, sample_rate=args.sample_rate)
    else:
        sig = synth_surrogates(args.kind, args.duration, args.seed, sample_rate=args.sample_rate)
    _write_output(args.output, WavFile(sig, args.format))
    if args.kind == "clicks":
        centers_path.write_text("".join(f"{c}\n" for c in centers))
    write_manifest(args.output, "synth", started, kind=args.kind, output=args.output,
                   duration_s=args.duration, seed=args.seed, sample_rate=args.sample_rate,
                   format=args.format, **extra)
    return EXIT_OK


def cmd_metrics(args) -> int:
    clean = _read_input(args.clean)
    processed = _read_input(args.processed)
    centers = None
    if args.impulse_centers:
        try:
            centers = _parse_centers(Path(args.impulse_centers).read_text())
        except OSError as exc:
            raise CliError(EXIT_IO, f"cannot read {args.impulse_centers}: {exc}") from None
    if clean.sample_rate != processed.sample_rate or len(clean.samples) != len(processed.samples):
        raise CliError(EXIT_CONFIG, "clean and processed differ in length or sample rate")
    m = compute_metrics(clean.signal, processed.signal, args.frame_ms, args.silence_floor_db, centers)
    sys.stdout.write(m.dumps())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wavedeclick",
                                     description="Wavelet-domain impulse noise suppression for speech.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("denoise", help="suppress impulses in a WAV file")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--config", help="key-value denoise config (defaults if omitted)")
    p.add_argument("--profile", default=BUILTIN_CLICK, help=f"impulse profile file or {BUILTIN_CLICK}")
    p.add_argument("--strict-literal", action="store_true",
                   help="apply coarse attenuation to signed coefficients")
    p.add_argument("--format", choices=("pcm16", "float32"), help="output encoding (default: as input)")
    p.set_defaults(func=cmd_denoise)

    p = sub.add_parser("learn-profile", help="learn an impulse profile from a noise-only recording")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--threshold-db", type=float, default=20.0)
    p.add_argument("--max-segments", type=int, default=None)
    p.add_argument("--min-separation", type=int, default=2 * DEFAULT_RADIUS)
    p.add_argument("--radius", type=int, default=DEFAULT_RADIUS)
    p.set_defaults(func=cmd_learn_profile)

    p = sub.add_parser("analyze", help="per-point decay across scales and Lipschitz slope as CSV")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--centers", default="auto", help="comma-separated sample indices or 'auto'")
    p.add_argument("--radius", type=int, default=DEFAULT_RADIUS)
    p.add_argument("--threshold-db", type=float, default=20.0)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("synth", help="generate synthetic test material")
    p.add_argument("kind", help=", ".join(SYNTH_KINDS))
    p.add_argument("output")
    p.add_argument("--duration", type=float, default=1.0, help="seconds")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sample-rate", type=int, default=16000)
    p.add_argument("--format", choices=("pcm16", "float32"), default="float32")
    p.add_argument("--rate", type=float, default=10.0, help="clicks per second (clicks)")
    p.add_argument("--amp-min", type=float, default=0.2)
    p.add_argument("--amp-max", type=float, default=1.0)
    p.add_argument("--width-min-ms", type=float, default=0.25)
    p.add_argument("--width-max-ms", type=float, default=1.0)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("metrics", help="objective metrics of processed against clean audio")
    p.add_argument("clean")
    p.add_argument("processed")
    p.add_argument("--impulse-centers", help="file of sample indices, one per line")
    p.add_argument("--frame-ms", type=float, default=32.0)
    p.add_argument("--silence-floor-db", type=float, default=-60.0)
    p.set_defaults(func=cmd_metrics)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"wavedeclick {args.command}: {exc}", file=sys.stderr)
        return exc.code
    except ValueError as exc:
        print(f"wavedeclick {args.command}: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
