"""Link-level BER simulator for an 802.16 OFDM physical layer over SUI channels."""

from .params import CodingProfile, DerivedParams, Modulation, PrimitiveParams, derive_params, \
    find_profile, profile_table

__version__ = "0.1.0"
