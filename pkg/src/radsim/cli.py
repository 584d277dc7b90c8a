"""Command-line front end.

Every subcommand writes machine-readable output to the file paths named in
its flags and prints a short human summary to stdout. All randomness flows
from explicit ``--seed`` flags (default 0, never wall-clock). Exit codes:
0 success, 2 usage error (argparse), 1 runtime/domain error with a one-line
diagnostic on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import codec, pipeline, propagation, recognition, spectral
from .channel import ChannelParams, apply_channel, measure_snr
from .errors import ConfigurationError, RadsimError
from .modulation import (CarrierSpec, ask_demodulate, ask_modulate, compose_emitted,
                         fsk_demodulate, fsk_modulate, generate_carrier, psk_demodulate,
                         psk_modulate)
from .signals import read_signal, write_signal


def _add_carrier_flags(parser, default_fc=2000.0, default_rate=48000.0):
    parser.add_argument("--fc", type=float, default=default_fc, help="carrier center frequency, Hz")
    parser.add_argument("--amplitude", type=float, default=1.0, help="carrier amplitude")
    parser.add_argument("--phase", type=float, default=0.0, help="carrier initial phase, radians")
    parser.add_argument("--sample-rate", type=float, default=default_rate, help="sample rate, Hz")


def _carrier_from(args) -> CarrierSpec:
    return CarrierSpec(center_frequency=args.fc, amplitude=args.amplitude,
                       initial_phase=args.phase, sample_rate=args.sample_rate)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="radsim",
        description="Deterministic signal-chain simulator: payload coding, digital "
                    "modulation, channel degradation, spectral analysis, and "
                    "signature-based recognition.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("propagate", help="simulate the expected-infection curve")
    p.add_argument("--n", type=int, required=True, help="computer count N")
    p.add_argument("--m", type=int, required=True, help="communications per unit time M")
    p.add_argument("--x0", type=int, default=1, help="initially infected count")
    p.add_argument("--steps", type=int, default=100, help="number of time steps")
    p.add_argument("--method", choices=["closed", "recurrence", "montecarlo"], default="closed")
    p.add_argument("--trials", type=int, default=200, help="Monte Carlo trials")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="curve CSV output path")

    p = sub.add_parser("payload", help="generate or convert a binary payload")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--bits", type=int, help="generate this many random bits")
    src.add_argument("--hex", help="hex string to expand into bits")
    src.add_argument("--hex-file", help="file containing a hex string")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bit-rate", type=float, default=250.0)
    p.add_argument("--out", required=True, help="bit text file output path")

    p = sub.add_parser("encode", help="Manchester-encode bits and/or render a rectangular waveform")
    p.add_argument("--in", dest="infile", required=True, help="bit text file")
    p.add_argument("--bit-rate", type=float, default=250.0)
    p.add_argument("--manchester-out", help="half-bit level text file output")
    p.add_argument("--rect-out", help="rectangular waveform signal output")
    p.add_argument("--sample-rate", type=float, default=48000.0, help="for --rect-out")
    p.add_argument("--high", type=float, default=1.0, help="rectangular high level")
    p.add_argument("--low", type=float, default=0.0, help="rectangular low level")

    p = sub.add_parser("modulate", help="modulate a bit stream onto a carrier")
    p.add_argument("--in", dest="infile", required=True, help="bit text file")
    p.add_argument("--bit-rate", type=float, default=250.0)
    p.add_argument("--scheme", choices=["ask", "fsk", "psk"], required=True)
    _add_carrier_flags(p)
    p.add_argument("--compose", action="store_true", help="add the carrier to the modulated signal")
    p.add_argument("--fsk-phase-reset", action="store_true",
                   help="reset FSK phase at bit boundaries (literal per-bit cosines)")
    p.add_argument("--out", required=True, help="signal output path (raw f64 + JSON sidecar)")

    p = sub.add_parser("demodulate", help="recover bits from a modulated signal")
    p.add_argument("--in", dest="infile", required=True, help="signal input path")
    p.add_argument("--scheme", choices=["ask", "fsk", "psk"], required=True)
    p.add_argument("--n-bits", type=int, required=True)
    p.add_argument("--bit-rate", type=float, default=250.0)
    _add_carrier_flags(p)
    p.add_argument("--threshold-fraction", type=float, default=0.5, help="ASK energy threshold")
    p.add_argument("--expected", help="bit text file to compare against (prints BER)")
    p.add_argument("--out", required=True, help="decoded bit text file output")

    p = sub.add_parser("channel", help="apply attenuation and additive Gaussian noise")
    p.add_argument("--in", dest="infile", required=True, help="signal input path")
    p.add_argument("--attenuation-db", type=float, default=0.0)
    noise = p.add_mutually_exclusive_group(required=True)
    noise.add_argument("--snr-db", type=float, help="target SNR at the channel output")
    noise.add_argument("--noise-power", type=float, help="noise variance, linear")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="signal output path")

    p = sub.add_parser("spectrum", help="FFT magnitude spectrum or STFT spectrogram")
    p.add_argument("--in", dest="infile", required=True, help="signal input path")
    p.add_argument("--fft-size", type=int, help="power-of-two FFT size (default: full length)")
    p.add_argument("--stft", action="store_true", help="write an STFT spectrogram instead")
    p.add_argument("--window-length", type=int, default=256)
    p.add_argument("--hop", type=int, default=128)
    p.add_argument("--window", choices=["rectangular", "hann"], default="hann")
    p.add_argument("--out", required=True, help="CSV output path")

    p = sub.add_parser("peaks", help="detect spectral peaks")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--in", dest="infile", help="signal input path (FFT computed here)")
    src.add_argument("--spectrum", help="spectrum CSV input path")
    p.add_argument("--relative-threshold", type=float, default=0.1)
    p.add_argument("--min-separation", type=float, default=0.0, help="Hz")
    p.add_argument("--out", required=True, help="peaks CSV output path")

    p = sub.add_parser("features", help="extract a feature vector from a signal")
    p.add_argument("--in", dest="infile", required=True, help="signal input path")
    p.add_argument("--out", required=True, help="feature JSON output path")

    p = sub.add_parser("library-add", help="add a labeled template signal to a signature library")
    p.add_argument("--library", required=True, help="library JSON path (created if missing)")
    p.add_argument("--label", required=True)
    p.add_argument("--in", dest="infile", required=True, help="template signal input path")
    p.add_argument("--fft-size", type=int, default=recognition.DEFAULT_FFT_SIZE,
                   help="analysis FFT size for a newly created library")
    p.add_argument("--meta", action="append", default=[], metavar="KEY=VALUE",
                   help="metadata entry (repeatable)")

    p = sub.add_parser("library-list", help="list the entries of a signature library")
    p.add_argument("--library", required=True)

    p = sub.add_parser("classify", help="classify a signal against a signature library")
    p.add_argument("--in", dest="infile", required=True, help="signal input path")
    p.add_argument("--library", required=True)
    p.add_argument("--threshold", type=float, default=recognition.DEFAULT_THRESHOLD)
    p.add_argument("--out", help="optional classification JSON output path")

    p = sub.add_parser("run", help="run the full pipeline experiment")
    p.add_argument("--config", help="experiment config JSON path")
    p.add_argument("--defaults", action="store_true", help="use the built-in default config")
    p.add_argument("--seed", type=int)
    p.add_argument("--payload-bits", type=int)
    p.add_argument("--bit-rate", type=float)
    p.add_argument("--fc", type=float)
    p.add_argument("--amplitude", type=float)
    p.add_argument("--phase", type=float)
    p.add_argument("--sample-rate", type=float)
    p.add_argument("--modulation", choices=["ask", "fsk", "psk"])
    compose = p.add_mutually_exclusive_group()
    compose.add_argument("--compose", dest="compose", action="store_true", default=None)
    compose.add_argument("--no-compose", dest="compose", action="store_false")
    p.add_argument("--attenuation-db", type=float)
    p.add_argument("--snr-db", type=float)
    p.add_argument("--noise-power", type=float)
    p.add_argument("--channel-seed", type=int, default=0)
    demod = p.add_mutually_exclusive_group()
    demod.add_argument("--demodulate", dest="demodulate", action="store_true", default=None)
    demod.add_argument("--no-demodulate", dest="demodulate", action="store_false")
    p.add_argument("--stft-window", type=int)
    p.add_argument("--stft-hop", type=int)
    p.add_argument("--library", help="signature library for classification")
    p.add_argument("--threshold", type=float, help="classification threshold")
    p.add_argument("--out", required=True, help="output directory")

    return parser


def _cmd_propagate(args) -> int:
    params = propagation.PropagationParams(args.n, args.m, args.x0)
    if args.method == "closed":
        curve = propagation.simulate_curve(params, args.steps, "closed_form")
    elif args.method == "recurrence":
        curve = propagation.simulate_curve(params, args.steps, "recurrence")
    else:
        curve = propagation.monte_carlo_propagation(params, args.seed, args.steps, args.trials)
    propagation.write_curve_csv(curve, args.out)
    final = float(curve.expected_infected[-1])
    print(f"wrote {args.out}: {len(curve)} steps, final expected infected {final:.6g}")
    if params.initial_infected < params.n_computers:
        print(f"inflection time (closed form): {propagation.inflection_time(params):.6g}")
    return 0


def _cmd_payload(args) -> int:
    if args.hex is not None:
        stream = codec.hex_to_bits(args.hex, args.bit_rate)
    elif args.hex_file is not None:
        stream = codec.hex_to_bits(Path(args.hex_file).read_text().strip(), args.bit_rate)
    else:
        n_bits = args.bits if args.bits is not None else 64
        stream = codec.random_payload(args.seed, n_bits, args.bit_rate)
    codec.write_bits(stream, args.out)
    print(f"wrote {args.out}: {len(stream)} bits at {args.bit_rate} bit/s")
    return 0


def _cmd_encode(args) -> int:
    if args.manchester_out is None and args.rect_out is None:
        raise ConfigurationError("nothing to do: give --manchester-out and/or --rect-out")
    stream = codec.read_bits(args.infile, args.bit_rate)
    if args.manchester_out is not None:
        encoded = codec.manchester_encode(stream)
        codec.write_levels(encoded, args.manchester_out)
        print(f"wrote {args.manchester_out}: {len(encoded)} half-bit levels")
    if args.rect_out is not None:
        wave = codec.rectangular_waveform(stream, args.sample_rate, args.high, args.low)
        write_signal(wave, args.rect_out)
        print(f"wrote {args.rect_out}: {len(wave)} samples at {wave.sample_rate} Hz")
    return 0


def _cmd_modulate(args) -> int:
    stream = codec.read_bits(args.infile, args.bit_rate)
    spec = _carrier_from(args)
    if args.scheme == "fsk":
        signal = fsk_modulate(stream, spec, phase_continuous=not args.fsk_phase_reset)
    elif args.scheme == "ask":
        signal = ask_modulate(stream, spec)
    else:
        signal = psk_modulate(stream, spec)
    if args.compose:
        carrier = generate_carrier(spec, len(signal) / spec.sample_rate)
        signal = compose_emitted(carrier, signal)
    write_signal(signal, args.out)
    print(f"wrote {args.out}: {args.scheme} over {len(stream)} bits, "
          f"{len(signal)} samples ({signal.duration:.6g} s)")
    return 0


def _cmd_demodulate(args) -> int:
    signal = read_signal(args.infile)
    spec = _carrier_from(args)
    if args.scheme == "fsk":
        stream = fsk_demodulate(signal, spec, args.n_bits, args.bit_rate)
    elif args.scheme == "psk":
        stream = psk_demodulate(signal, spec, args.n_bits, args.bit_rate)
    else:
        stream = ask_demodulate(signal, spec, args.n_bits, args.bit_rate, args.threshold_fraction)
    codec.write_bits(stream, args.out)
    print(f"wrote {args.out}: {len(stream)} bits")
    if args.expected:
        expected = codec.read_bits(args.expected, args.bit_rate)
        if len(expected) != len(stream):
            raise ConfigurationError(
                f"--expected has {len(expected)} bits but {len(stream)} were decoded")
        errors = int(np.count_nonzero(expected.bits != stream.bits))
        print(f"bit errors: {errors}/{len(stream)} (BER {errors / len(stream):.6g})")
    return 0


def _cmd_channel(args) -> int:
    signal = read_signal(args.infile)
    params = ChannelParams(attenuation_db=args.attenuation_db, snr_db=args.snr_db,
                           noise_power=args.noise_power, seed=args.seed)
    degraded = apply_channel(signal, params)
    write_signal(degraded, args.out)
    snr = measure_snr(signal, degraded)
    print(f"wrote {args.out}: measured SNR {snr:.3f} dB")
    return 0


def _cmd_spectrum(args) -> int:
    signal = read_signal(args.infile)
    if args.stft:
        gram = spectral.stft(signal, args.window_length, args.hop, args.window)
        spectral.write_spectrogram_csv(gram, args.out)
        print(f"wrote {args.out}: {gram.magnitudes.shape[0]} frames x "
              f"{gram.magnitudes.shape[1]} bins")
    else:
        spec = spectral.fft_magnitude(signal, args.fft_size)
        spectral.write_spectrum_csv(spec, args.out)
        print(f"wrote {args.out}: {spec.magnitudes.size} bins, "
              f"bin width {spec.bin_width:.6g} Hz")
    return 0


def _cmd_peaks(args) -> int:
    if args.infile is not None:
        spec = spectral.fft_magnitude(read_signal(args.infile))
    else:
        spec = spectral.read_spectrum_csv(args.spectrum)
    peaks = spectral.find_peaks(spec, args.relative_threshold, args.min_separation)
    spectral.write_peaks_csv(peaks, args.out)
    print(f"wrote {args.out}: {len(peaks)} peaks")
    for pk in peaks:
        print(f"  {pk.frequency:.6g} Hz  magnitude {pk.magnitude:.6g}  bin {pk.bin_index}")
    return 0


def _cmd_features(args) -> int:
    features = recognition.extract_features(read_signal(args.infile))
    Path(args.out).write_text(json.dumps(features.as_dict(), sort_keys=True, indent=2) + "\n")
    print(f"wrote {args.out}: rms {features.rms_power:.6g}, "
          f"centroid {features.spectral_centroid:.6g} Hz, "
          f"entropy {features.spectral_entropy:.4f}")
    return 0


def _parse_metadata(pairs: list[str]) -> dict:
    meta = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep or not key:
            raise ConfigurationError(f"--meta expects KEY=VALUE, got {pair!r}")
        meta[key] = value
    return meta


def _cmd_library_add(args) -> int:
    signal = read_signal(args.infile)
    path = Path(args.library)
    if path.exists():
        library = recognition.library_load(path)
    else:
        library = recognition.SignatureLibrary(fft_size=args.fft_size,
                                               sample_rate=signal.sample_rate)
    library = recognition.library_add(library, args.label, signal, _parse_metadata(args.meta))
    recognition.library_save(library, path)
    print(f"wrote {path}: {len(library)} entries ({', '.join(library.labels())})")
    return 0


def _cmd_library_list(args) -> int:
    library = recognition.library_load(args.library)
    print(f"{args.library}: fft_size {library.fft_size}, sample_rate {library.sample_rate}, "
          f"{len(library)} entries")
    for entry in library.entries:
        meta = ", ".join(f"{k}={v}" for k, v in sorted(entry.metadata.items()))
        print(f"  {entry.label}" + (f"  [{meta}]" if meta else ""))
    return 0


def _cmd_classify(args) -> int:
    library = recognition.library_load(args.library)
    result = recognition.classify(read_signal(args.infile), library, args.threshold)
    doc = {
        "label": result.label,
        "score": result.score,
        "runner_up": list(result.runner_up) if result.runner_up else None,
    }
    if args.out:
        Path(args.out).write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    print(f"label: {result.label} (score {result.score:.4f})")
    if result.runner_up:
        print(f"runner-up: {result.runner_up[0]} (score {result.runner_up[1]:.4f})")
    return 0


def _cmd_run(args) -> int:
    if args.config:
        try:
            doc = json.loads(Path(args.config).read_text())
        except json.JSONDecodeError as e:
            raise ConfigurationError(
                f"{args.config}: invalid JSON at line {e.lineno} column {e.colno}") from e
        config = pipeline.config_from_json(doc)
    else:
        config = pipeline.DEFAULT_CONFIG

    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.payload_bits is not None:
        overrides["payload_bits"] = args.payload_bits
    if args.bit_rate is not None:
        overrides["bit_rate"] = args.bit_rate
    if args.modulation is not None:
        overrides["modulation"] = args.modulation
    if args.compose is not None:
        overrides["compose_with_carrier"] = args.compose
    if args.demodulate is not None:
        overrides["demodulate"] = args.demodulate
    if args.stft_window is not None:
        overrides["stft_window"] = args.stft_window
    if args.stft_hop is not None:
        overrides["stft_hop"] = args.stft_hop
    if args.library is not None:
        overrides["library_path"] = args.library
    if args.threshold is not None:
        overrides["classification_threshold"] = args.threshold

    carrier_overrides = {}
    if args.fc is not None:
        carrier_overrides["center_frequency"] = args.fc
    if args.amplitude is not None:
        carrier_overrides["amplitude"] = args.amplitude
    if args.phase is not None:
        carrier_overrides["initial_phase"] = args.phase
    if args.sample_rate is not None:
        carrier_overrides["sample_rate"] = args.sample_rate
    if carrier_overrides:
        overrides["carrier"] = replace(config.carrier, **carrier_overrides)

    if args.snr_db is not None or args.noise_power is not None or args.attenuation_db is not None:
        noise_power = args.noise_power
        if args.snr_db is None and noise_power is None:
            noise_power = 0.0  # attenuation-only channel
        overrides["channel"] = ChannelParams(
            attenuation_db=args.attenuation_db if args.attenuation_db is not None else 0.0,
            snr_db=args.snr_db,
            noise_power=noise_power,
            seed=args.channel_seed)

    config = replace(config, output_dir=args.out, **overrides)
    report = pipeline.run_experiment(config)
    print(f"report: {Path(args.out) / 'report.json'}")
    print(f"peaks: {', '.join(f'{f:.6g} Hz' for f in report.peak_frequencies_hz) or 'none'}")
    if report.measured_snr_db is not None:
        print(f"measured SNR: {report.measured_snr_db:.3f} dB")
    if report.ber is not None:
        print(f"BER: {report.ber:.6g} ({report.bit_errors}/{report.payload_bits} bits)")
    if report.classification is not None:
        print(f"classified as: {report.classification['label']} "
              f"(score {report.classification['score']:.4f})")
    return 0


_COMMANDS = {
    "propagate": _cmd_propagate,
    "payload": _cmd_payload,
    "encode": _cmd_encode,
    "modulate": _cmd_modulate,
    "demodulate": _cmd_demodulate,
    "channel": _cmd_channel,
    "spectrum": _cmd_spectrum,
    "peaks": _cmd_peaks,
    "features": _cmd_features,
    "library-add": _cmd_library_add,
    "library-list": _cmd_library_list,
    "classify": _cmd_classify,
    "run": _cmd_run,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (RadsimError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


def entry_point() -> None:
    sys.exit(main())
