"""SNR at BER 1e-3 for every profile on a set of channels."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

from ..params import CodingProfile
from .sim import REFERENCE_SNR_AT_1E3, NoCrossingError, SimConfig, SweepResult, find_crossing

log = logging.getLogger(__name__)

TARGET_BER = 1e-3


@dataclass
class Table5Result:
    channels: list[str]
    profiles: list[CodingProfile]
    snr: dict[tuple[str, str], float] = field(default_factory=dict)
    sweeps: dict[tuple[str, str], SweepResult] = field(default_factory=dict)
    failures: dict[tuple[str, str], str] = field(default_factory=dict)

    def row(self, channel: str) -> list[float]:
        return [self.snr.get((channel, p.name), math.nan) for p in self.profiles]

    def reference_row(self, channel: str) -> list[float] | None:
        ref = REFERENCE_SNR_AT_1E3.get(channel.lower())
        if ref is None or len(ref) != len(self.profiles):
            return None
        return list(ref)

    def warnings(self) -> list[str]:
        seen: list[str] = []
        for res in self.sweeps.values():
            seen.extend(w for w in res.warnings if w not in seen)
        return seen


def run_table5(base: SimConfig, channels: list[str], profiles: list[CodingProfile],
               target_ber: float = TARGET_BER) -> Table5Result:
    """Locate the crossing for each (channel, profile) pair.

    Within a channel the search for each profile starts at the previous
    profile's crossing, rounded down to the step grid.
    """
    out = Table5Result([c.lower() for c in channels], list(profiles))
    for channel in out.channels:
        start = base.snr_start
        for prof in profiles:
            cfg = replace(base, profile=prof, channel=channel, snr_start=start,
                          snr_stop=max(base.snr_stop, start), output_path=None)
            key = (channel, prof.name)
            try:
                snr, sweep = find_crossing(cfg, target_ber)
            except NoCrossingError as exc:
                out.failures[key] = str(exc)
                log.warning("%s/%s: %s", channel, prof.name, exc)
                continue
            out.snr[key] = snr
            out.sweeps[key] = sweep
            log.info("%s %s: %.2f dB (%d points, %.1fs)", channel, prof.name, snr,
                     len(sweep.points), sweep.elapsed_s)
            start = base.snr_start + math.floor((snr - base.snr_start) / base.snr_step) * base.snr_step
    return out


def format_table(result: Table5Result) -> str:
    names = [p.name for p in result.profiles]
    width = max(10, *(len(n) + 1 for n in names))
    lines = ["SNR (dB) at BER 1e-3: simulated / reported / difference",
             "channel".ljust(10) + "".join(n.rjust(width) for n in names)]
    for ch in result.channels:
        sim = result.row(ch)
        lines.append(ch.ljust(10) + "".join(f"{v:{width}.2f}" for v in sim))
        ref_row = result.reference_row(ch)
        if ref_row is not None:
            lines.append("  reported" + "".join(f"{v:{width}.2f}" for v in ref_row))
            lines.append("  delta".ljust(10) + "".join(f"{s - p:{width}.2f}" for s, p in zip(sim, ref_row)))
    for key, msg in result.failures.items():
        lines.append(f"{key[0]}/{key[1]}: {msg}")
    return "\n".join(lines)


def table5_csv_lines(result: Table5Result) -> list[str]:
    lines = ["channel,profile,snr_db,reported_snr_db"]
    for ch in result.channels:
        ref_row = result.reference_row(ch) or [math.nan] * len(result.profiles)
        for prof, snr, ref in zip(result.profiles, result.row(ch), ref_row):
            lines.append(f"{ch},{prof.name},{snr!r},{ref!r}")
    return lines
