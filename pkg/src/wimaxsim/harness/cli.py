"""Command line entry point: ``sweep``, ``table5`` and ``selftest``."""

from __future__ import annotations

import argparse
import configparser
import logging
import sys
from fractions import Fraction
from pathlib import Path

from ..channel import ChannelConfigError
from ..params import find_profile, profile_table
from .selftest import run_selftest
from .sim import SimConfig, ebn0_db, sweep
from .table5 import format_table, run_table5, table5_csv_lines

log = logging.getLogger("wimaxsim")

# OFDM symbols per point so that deep fades, not just the first 100 errors, set the BER
TABLE5_MIN_FADES = 20_000

# [sim] keys accepted in a --config file, mapped to SimConfig fields
_CONFIG_KEYS = {
    "profile": "profile",
    "channel": "channel",
    "channel_config": "channel_config",
    "guard": "guard",
    "snr": "snr",
    "max_bits": "max_bits",
    "target_errors": "target_errors",
    "seed": "seed",
    "out": "out",
    "min_fades": "min_fades",
    "batch": "batch",
    "fading_hop": "fading_hop",
    "csi_llr": "csi_llr",
}


class CliError(Exception):
    """A user-facing problem reported as a one-line diagnostic."""


def parse_snr(text: str) -> tuple[float, float, float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected start:step:stop, got {text!r}")
    try:
        start, step, stop = (float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"non-numeric SNR range {text!r}") from None
    return start, step, stop


def parse_guard(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"bad guard ratio {text!r}") from None


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="INI file with a [sim] section supplying defaults")
    p.add_argument("--channel-config", help="SUI channel definitions (INI); bundled table if omitted")
    p.add_argument("--guard", type=parse_guard, help="cyclic prefix ratio (1/4, 1/8, 1/16, 1/32)")
    p.add_argument("--max-bits", type=int, help="payload bit budget per SNR point")
    p.add_argument("--target-errors", type=int, help="stop a point after this many bit errors")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--min-fades", type=int,
                   help="minimum OFDM symbols per point on fading channels")
    p.add_argument("--batch", type=int, help="OFDM symbols simulated per batch")
    p.add_argument("--fading-hop", type=int,
                   help="fading coefficients advanced per OFDM symbol (0 = physical time)")
    p.add_argument("--csi-llr", action="store_true", default=None,
                   help="weight bit metrics by per-subcarrier channel power")
    p.add_argument("-v", "--verbose", action="count", default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wimaxsim",
                                     description="OFDM link-level BER simulation over SUI channels.")
    sub = parser.add_subparsers(dest="command")

    sw = sub.add_parser("sweep", help="BER over an SNR grid, written as CSV")
    sw.add_argument("--profile", help="coding profile, e.g. qpsk-1/2")
    sw.add_argument("--channel", help="awgn, identity or a SUI channel name")
    sw.add_argument("--snr", type=parse_snr, help="start:step:stop in dB")
    sw.add_argument("--out", help="CSV path (stdout if omitted)")
    sw.add_argument("--workers", type=int, default=1, help="parallel SNR points")
    sw.add_argument("--uncoded", action="store_true", help="bypass FEC and interleaving")
    _common(sw)

    t5 = sub.add_parser("table5", help="SNR at BER 1e-3 for all profiles")
    t5.add_argument("--channels", default="sui-1,sui-2,sui-3", help="comma separated channel names")
    t5.add_argument("--snr-start", type=float, default=0.0, help="first SNR of each channel search")
    t5.add_argument("--snr-step", type=float, default=1.0, help="search step in dB")
    t5.add_argument("--out", help="also write the matrix as CSV")
    _common(t5)

    sub.add_parser("selftest", help="run the built-in property checks")
    return parser


def _parse_bool(text: str) -> bool:
    value = text.strip().lower()
    if value not in ("true", "false", "yes", "no", "1", "0"):
        raise ValueError(f"expected true or false, got {text!r}")
    return value in ("true", "yes", "1")


def _load_config_file(path: Path | None) -> dict[str, str]:
    if path is None:
        return {}
    cp = configparser.ConfigParser()
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise CliError(f"cannot read config {path}: {exc.strerror}") from None
    except configparser.Error as exc:
        raise CliError(f"{path}: {exc.message}") from None
    if not cp.has_section("sim"):
        raise CliError(f"{path}: missing [sim] section")
    unknown = set(cp["sim"]) - set(_CONFIG_KEYS)
    if unknown:
        raise CliError(f"{path}: unknown keys {', '.join(sorted(unknown))}")
    return dict(cp["sim"])


def _merge(args: argparse.Namespace) -> argparse.Namespace:
    """Fill unset flags from the config file; command line flags win."""
    file_values = _load_config_file(args.config)
    converters = {"guard": parse_guard, "snr": parse_snr, "max_bits": int, "target_errors": int,
                  "seed": int, "min_fades": int, "batch": int, "fading_hop": int,
                  "csi_llr": _parse_bool}
    for key, raw in file_values.items():
        attr = _CONFIG_KEYS[key]
        if not hasattr(args, attr) or getattr(args, attr) is not None:
            continue
        try:
            setattr(args, attr, converters.get(key, str)(raw))
        except (argparse.ArgumentTypeError, ValueError) as exc:
            raise CliError(f"{args.config}: {key}: {exc}") from None
    return args


def _config_kwargs(args) -> dict:
    kw = {}
    for attr, field_name in (("guard", "guard_ratio"), ("max_bits", "max_bits"),
                             ("target_errors", "target_errors"), ("seed", "master_seed"),
                             ("channel_config", "channel_config"), ("min_fades", "min_fades"),
                             ("batch", "batch_symbols"), ("fading_hop", "fading_hop"),
                             ("csi_llr", "csi_llr")):
        value = getattr(args, attr, None)
        if value is not None:
            kw[field_name] = value
    return kw


def cmd_sweep(args) -> int:
    if args.profile is None:
        raise CliError("--profile is required (e.g. qpsk-1/2)")
    start, step, stop = args.snr or (0.0, 1.0, 10.0)
    cfg = SimConfig(profile=find_profile(args.profile), channel=args.channel or "awgn",
                    snr_start=start, snr_step=step, snr_stop=stop, output_path=args.out,
                    uncoded=args.uncoded, **_config_kwargs(args))
    link = cfg.link()
    log.info("%s on %s: Eb/N0 = SNR %+.2f dB", cfg.profile.name, cfg.channel,
             ebn0_db(0.0, link))
    result = sweep(cfg, workers=max(args.workers, 1))
    for w in result.warnings:
        log.warning("%s", w)
    if args.out is None:
        print("snr_db,bits,bit_errors,ber,stop_reason")
        for p in result.points:
            print(f"{p.snr_db!r},{p.bits},{p.bit_errors},{p.ber!r},{p.stop_reason.value}")
    else:
        log.info("wrote %d points to %s", len(result.points), args.out)
    return 0


def cmd_table5(args) -> int:
    channels = [c.strip() for c in args.channels.split(",") if c.strip()]
    if not channels:
        raise CliError("--channels is empty")
    profiles = profile_table()
    kw = _config_kwargs(args)
    kw.setdefault("min_fades", TABLE5_MIN_FADES)
    base = SimConfig(profile=profiles[0], snr_start=args.snr_start,
                     snr_stop=args.snr_start, snr_step=args.snr_step, **kw)
    result = run_table5(base, channels, profiles)
    print(format_table(result))
    link_offsets = ", ".join(f"{p.name} {ebn0_db(0.0, SimConfig(profile=p).link()):+.2f}"
                             for p in profiles)
    print(f"Eb/N0 = SNR + offset (dB): {link_offsets}")
    for w in result.warnings():
        print(f"warning: {w}")
    if args.out:
        Path(args.out).write_text("\n".join(table5_csv_lines(result)) + "\n")
    return 0 if not result.failures else 1


def cli_main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    if not argv:
        parser.print_usage(sys.stderr)
        return 2
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed usage
        return int(exc.code or 0)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    level = logging.WARNING - 10 * getattr(args, "verbose", 0)
    logging.basicConfig(level=max(level, logging.DEBUG), format="%(levelname)s %(message)s")
    try:
        if args.command == "selftest":
            return 0 if run_selftest() else 1
        args = _merge(args)
        return cmd_sweep(args) if args.command == "sweep" else cmd_table5(args)
    except (CliError, ChannelConfigError, KeyError, ValueError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"wimaxsim: error: {msg}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main())
