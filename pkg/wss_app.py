"""
1-bit Wideband Spectrum Sensing - Command line entry point
Single-frame sensing, Monte Carlo sweeps, quantization-noise profiles and IQ replay
"""

import argparse
import sys
from dataclasses import replace
from typing import List, Optional

import config
from core.errors import SensingError
from core.harness import ExperimentConfig, export_eigenvalues, noise_profile, run_sweep
from core.sensing_engine import SensingEngine, SensingReport
from core.signal_model import SupportSet
from utils.experiment_config import load_experiment, parse_bits, parse_snr, resolve_threads
from utils.iq_io import export_iq, load_iq, read_metadata


_UNSET = object()  # --bits not given; "none" parses to None


def _bits_arg(value: str) -> Optional[int]:
    try:
        return parse_bits(value)
    except SensingError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _snr_arg(value: str) -> float:
    try:
        return parse_snr(value)
    except SensingError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wss_app.py",
        description="Subspace-aided wideband spectrum sensing from 1-bit multicoset samples",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    sense = commands.add_parser("sense", help="Sense one synthetic frame and print the estimated support")
    replay = commands.add_parser("replay", help="Sense a recorded IQ capture")
    replay.add_argument("input", help="Interleaved float32 I/Q file (sidecar <file>.yaml next to it)")
    for sub in (sense, replay):
        sub.add_argument("--config", help="YAML experiment file supplying scenario and detector settings")
        sub.add_argument("--seed", type=int, help="Trial seed (default: master_seed)")
        sub.add_argument("--p", type=int, help="Number of cosets (default: first p of the config, else 20)")
        sub.add_argument("--bits", type=_bits_arg, default=_UNSET, help="Quantizer depth: 1..64 or none")
        sub.add_argument("--eigs-out", dest="eigs_out", help="Write the covariance eigenvalues to this CSV")
    sense.add_argument("--snr", type=_snr_arg, help="SNR in dB, 'inf' for a noiseless frame")
    sense.add_argument("--K", type=int, help="Number of active primary users")
    sense.add_argument("--export", help="Also save the synthesized frame as an IQ capture")

    sweep = commands.add_parser("sweep", help="Run a Monte Carlo sweep and write the metrics CSV")
    sweep.add_argument("--config", required=True, help="YAML experiment file")
    sweep.add_argument("--out", help="Metrics CSV path (overrides the config)")
    sweep.add_argument("--seed", type=int, help="Master seed (overrides the config)")
    sweep.add_argument("--trials", type=int, help="Trials per cell (overrides the config)")
    sweep.add_argument("--threads", type=int, help=f"Worker threads (fallback: ${config.THREADS_ENV_VAR})")
    sweep.add_argument("--p", type=int, nargs="+", help="Coset counts to sweep")
    sweep.add_argument("--snr", type=_snr_arg, nargs="+", help="SNR values in dB")
    sweep.add_argument("--bits", type=_bits_arg, nargs="+", help="Quantizer depths (1..64 or none)")
    sweep.add_argument("--K", type=int, nargs="+", help="Numbers of active primary users")
    sweep.add_argument("--eigs-out", dest="eigs_out", help="Write every trial's eigenvalues to this CSV")
    sweep.add_argument("--timing", action="store_true", help="Record per-cell wall time in the CSV")

    profile = commands.add_parser("noise-profile", help="Per-channel power of the 1-bit quantization noise")
    profile.add_argument("--config", help="YAML experiment file supplying the scenario")
    profile.add_argument("--seed", type=int, help="Trial seed (default: master_seed)")
    profile.add_argument("--K", type=int, default=4, help="Number of active primary users (default 4)")
    profile.add_argument("--snr", type=_snr_arg, help="SNR in dB")
    profile.add_argument("--out", help="Noise profile CSV path")
    return parser


def _experiment(path: Optional[str]) -> ExperimentConfig:
    return load_experiment(path) if path else ExperimentConfig()


def _first(value, axis):
    return value if value is not None else axis[0]


def _print_report(report: SensingReport, truth: Optional[SupportSet]):
    print(f"📡 Coset offsets: {' '.join(str(c) for c in report.pattern.offsets)}")
    if truth is not None:
        print(f"🎯 True support: {truth}")
    print(f"🔢 K_hat: {report.k_hat}")
    print(f"✅ Estimated support: {report.estimate}")
    print("📊 Eigenvalues: " + " ".join(f"{value:.6e}" for value in report.model.eigenvalues))


def _export_report_eigs(report: SensingReport, path: Optional[str]):
    if path:
        records = [(0, 0, index, float(value)) for index, value in enumerate(report.model.eigenvalues, start=1)]
        export_eigenvalues(records, path)


def cmd_sense(args) -> int:
    experiment = _experiment(args.config)
    seed = args.seed if args.seed is not None else experiment.master_seed
    p = _first(args.p, experiment.p_values)
    bits = experiment.bits_values[0] if args.bits is _UNSET else args.bits
    K = _first(args.K, experiment.k_values)

    engine = experiment.engine().with_snr(_first(args.snr, experiment.snr_values))
    signal = engine.draw_scenario(K, seed)
    pattern = engine.draw_pattern(p, seed)
    report = engine.sense(signal, pattern, bits)

    _print_report(report, signal.truth)
    _export_report_eigs(report, args.eigs_out)
    if args.export:
        export_iq(signal, args.export, engine.spectrum)
    return 0


def cmd_replay(args) -> int:
    experiment = _experiment(args.config)
    meta = read_metadata(args.input)
    spectrum = replace(
        experiment.base,
        L=meta.channels,
        W=meta.sample_rate_hz,
        frame_len_N=meta.frame_len,
        subcarriers_C=min(experiment.base.subcarriers_C, meta.frame_len),
    )
    seed = args.seed if args.seed is not None else experiment.master_seed
    p = _first(args.p, experiment.p_values)
    bits = experiment.bits_values[0] if args.bits is _UNSET else args.bits

    engine = SensingEngine(spectrum, experiment.order_method, experiment.p_false,
                           experiment.covariance_domain, experiment.clip_sigma)
    signal = load_iq(args.input)
    pattern = engine.draw_pattern(p, seed)
    report = engine.sense(signal, pattern, bits)

    _print_report(report, signal.truth)
    _export_report_eigs(report, args.eigs_out)
    return 0


def cmd_sweep(args) -> int:
    experiment = load_experiment(args.config)
    overrides = {
        "out": args.out,
        "master_seed": args.seed,
        "trials": args.trials,
        "eigs_out": args.eigs_out,
        "p_values": args.p,
        "snr_values": args.snr,
        "bits_values": args.bits,
        "k_values": args.K,
    }
    changes = {name: value for name, value in overrides.items() if value is not None}
    changes["threads"] = resolve_threads(args.threads, experiment.threads)
    if args.timing:
        changes["record_timing"] = True
    experiment = replace(experiment, **changes)

    if not experiment.out:
        print("⚠️ No output path configured; metrics are printed only")
    run_sweep(experiment)
    return 0


def cmd_noise_profile(args) -> int:
    experiment = _experiment(args.config)
    seed = args.seed if args.seed is not None else experiment.master_seed
    spectrum = replace(experiment.base, snr_db=_first(args.snr, experiment.snr_values))

    profile = noise_profile(spectrum, seed, args.K)
    print(f"🎯 Support: {profile.support}")
    print(f"📊 Bussgang gain {profile.gain:.6f}, distortion power {profile.distortion_power:.6f}")
    print(f"📊 Occupied/vacant power ratio {profile.occupied_to_vacant:.3f}, "
          f"vacant CV {profile.vacant_cv:.3f}")
    if args.out:
        profile.export_to_csv(args.out)
    else:
        for channel, power in enumerate(profile.quantization_power, start=1):
            marker = "*" if channel in profile.support else " "
            print(f"  {channel:3d}{marker} {power:.6e}")
    return 0


COMMANDS = {
    "sense": cmd_sense,
    "replay": cmd_replay,
    "sweep": cmd_sweep,
    "noise-profile": cmd_noise_profile,
}


def cli_main(argv: Optional[List[str]] = None) -> int:
    """Run one subcommand; 0 on success, 2 on usage or parameter errors"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        return COMMANDS[args.command](args)
    except SensingError as exc:
        print(f"❌ {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"❌ {exc}", file=sys.stderr)
        return 1


# ===== MAIN ENTRY POINT =====

def main():
    """Main entry point"""
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
