"""SUI channel descriptions and their plain-text config format.

A channel file is INI-style, one section per channel::

    [SUI-1]
    terrain = C
    tap_delays_us = 0.0, 0.4, 0.9
    tap_powers_db = 0, -15, -20
    k_factors = 4, 0, 0
    doppler_hz = 0.4, 0.3, 0.5

Parsing rules:

* section names are channel names, matched case-insensitively;
* list values are comma separated decimals, surrounding whitespace ignored,
  and every list in a section must have the same length;
* ``k_factors`` are linear power ratios, ``tap_powers_db`` are dB relative
  to any reference;
* ``normalize`` (optional, default ``true``) rescales tap powers to a total
  of exactly 1 so the channel has unit average gain;
* ``terrain`` is one of ``A``, ``B``, ``C``; names ``SUI-1`` .. ``SUI-6`` must
  carry the terrain class of their family (1-2: C, 3-4: B, 5-6: A).
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path

import numpy as np

from .fading import SuiTapSpec


class Terrain(Enum):
    A = "Hilly terrain with moderate to heavy tree density"
    B = "Hilly terrain with light tree density or flat terrain with moderate to heavy tree density"
    C = "Mostly flat terrain with light tree densities"


SUI_TERRAIN = {1: Terrain.C, 2: Terrain.C, 3: Terrain.B, 4: Terrain.B, 5: Terrain.A, 6: Terrain.A}

_BOOL = {"true": True, "yes": True, "1": True, "false": False, "no": False, "0": False}


class ChannelConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SuiChannelSpec:
    name: str
    terrain: Terrain
    taps: tuple[SuiTapSpec, ...]

    def __post_init__(self):
        if not self.taps:
            raise ChannelConfigError(f"{self.name}: channel needs at least one tap")
        delays = [t.delay_s for t in self.taps]
        if delays[0] != 0:
            raise ChannelConfigError(f"{self.name}: first tap delay must be 0, got {delays[0]}")
        if any(b <= a for a, b in zip(delays, delays[1:])):
            raise ChannelConfigError(f"{self.name}: tap delays must be strictly increasing")
        m = re.fullmatch(r"sui-(\d+)", self.name.strip().lower())
        if m and int(m.group(1)) in SUI_TERRAIN:
            expected = SUI_TERRAIN[int(m.group(1))]
            if self.terrain is not expected:
                raise ChannelConfigError(
                    f"{self.name} belongs to terrain {expected.name}, not {self.terrain.name}"
                )

    @property
    def delays_s(self) -> np.ndarray:
        return np.array([t.delay_s for t in self.taps])

    @property
    def total_power(self) -> float:
        return float(sum(t.power for t in self.taps))


def _floats(section, key: str) -> list[float]:
    try:
        raw = section[key]
    except KeyError:
        raise ChannelConfigError(f"[{section.name}] missing key {key!r}") from None
    try:
        return [float(v) for v in raw.split(",") if v.strip()]
    except ValueError as exc:
        raise ChannelConfigError(f"[{section.name}] {key}: {exc}") from None


def _parse_section(section) -> SuiChannelSpec:
    delays = _floats(section, "tap_delays_us")
    powers_db = _floats(section, "tap_powers_db")
    kf = _floats(section, "k_factors")
    doppler = _floats(section, "doppler_hz")
    if not len(delays) == len(powers_db) == len(kf) == len(doppler):
        raise ChannelConfigError(f"[{section.name}] tap lists differ in length")
    try:
        terrain = Terrain[section.get("terrain", "").strip().upper()]
    except KeyError:
        raise ChannelConfigError(f"[{section.name}] terrain must be A, B or C") from None
    norm_text = section.get("normalize", "true").strip().lower()
    if norm_text not in _BOOL:
        raise ChannelConfigError(f"[{section.name}] normalize must be true or false")
    powers = 10 ** (np.asarray(powers_db) / 10)
    if _BOOL[norm_text]:
        powers = powers / powers.sum()
    try:
        taps = tuple(
            SuiTapSpec(delay_s=d * 1e-6, power=float(p), k_factor=k, doppler_hz=f)
            for d, p, k, f in zip(delays, powers, kf, doppler)
        )
    except ValueError as exc:
        raise ChannelConfigError(f"[{section.name}] {exc}") from None
    return SuiChannelSpec(name=section.name, terrain=terrain, taps=taps)


def parse_channels(text: str) -> dict[str, SuiChannelSpec]:
    """Parse channel config text into specs keyed by lower-case name."""
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ChannelConfigError(str(exc)) from None
    return {name.lower(): _parse_section(cp[name]) for name in cp.sections()}


def load_channels(path: str | Path | None = None) -> dict[str, SuiChannelSpec]:
    """Load a channel file, or the bundled SUI-1..6 set when ``path`` is None."""
    if path is None:
        text = resources.files("wimaxsim.channel").joinpath("sui_channels.ini").read_text()
    else:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ChannelConfigError(f"cannot read channel config {path}: {exc}") from None
    return parse_channels(text)
