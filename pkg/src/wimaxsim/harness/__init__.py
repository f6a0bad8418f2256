"""Monte Carlo driver, CLI and the BER-crossing table."""

from .chain import Link, RxStats
from .cli import cli_main
from .sim import (
    REFERENCE_SNR_AT_1E3,
    BerPoint,
    FadingTaps,
    NoCrossingError,
    SimConfig,
    StopReason,
    SweepResult,
    ebn0_db,
    emit_csv,
    find_crossing,
    profile_config,
    read_csv,
    run_point,
    snr_at_ber,
    snr_for_ebn0,
    sweep,
)
from .table5 import Table5Result, format_table, run_table5
