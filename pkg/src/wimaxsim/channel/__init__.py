from .fading import (
    SuiTapSpec,
    TapProcess,
    doppler_psd,
    generate_tap,
    interpolate_to_symbols,
    overlap_add,
    ricean_split,
    shaping_filter,
)
from .propagation import (
    add_awgn,
    apply_channel,
    frequency_response,
    ideal_equalize,
    quantize_delays,
)
from .sui import ChannelConfigError, SuiChannelSpec, Terrain, load_channels, parse_channels

__all__ = [
    "ChannelConfigError",
    "SuiChannelSpec",
    "SuiTapSpec",
    "TapProcess",
    "Terrain",
    "add_awgn",
    "apply_channel",
    "doppler_psd",
    "frequency_response",
    "generate_tap",
    "ideal_equalize",
    "interpolate_to_symbols",
    "load_channels",
    "overlap_add",
    "parse_channels",
    "quantize_delays",
    "ricean_split",
    "shaping_filter",
]
