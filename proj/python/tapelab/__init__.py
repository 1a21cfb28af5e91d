"""Consolidated tape simulator and SIP accuracy analytics."""

import json
import os

from ._tapelab import (
    TICKS_PER_DOLLAR,
    ConfigError,
    CsvImportError,
    DataNotFound,
    DegenerateFit,
    IoError,
    OrderingError,
    PriceParseError,
    TapeFormatError,
    TapelabError,
    __version__,
    detect_out_of_sequence,
    fit_trend,
    price_from_decimal,
    price_to_decimal,
    read_tape,
    run_cli,
    scenario_hash,
    scenario_text,
    spearman,
    tape_file_size,
    write_tape,
)
from . import _tapelab

MSG_TRADE, MSG_BID, MSG_ASK = 0, 1, 2


def simulate(out_dir, preset=None, config_text=None, seed=None):
    """Write a run directory and return its manifest."""
    return json.loads(_tapelab._simulate(os.fspath(out_dir), preset, config_text, seed))


def analyze(subcommand, tapes=(), run=None, symbol=None, symbols=None, include_quotes=False,
            ex_trf=False, bin_width_cents=1, ordering="sip", kinds="both", group="exchange",
            out_dir="."):
    """Run one analysis; CSVs go to out_dir and the JSON summary is returned."""
    return json.loads(_tapelab._analyze(
        subcommand, [os.fspath(t) for t in tapes], None if run is None else os.fspath(run), symbol,
        None if symbols is None else os.fspath(symbols), include_quotes, ex_trf, bin_width_cents,
        ordering, kinds, group, os.fspath(out_dir)))


def report(run_dir):
    return json.loads(_tapelab._report(os.fspath(run_dir)))


__all__ = [
    "TICKS_PER_DOLLAR", "MSG_TRADE", "MSG_BID", "MSG_ASK", "ConfigError", "CsvImportError",
    "DataNotFound", "DegenerateFit", "IoError", "OrderingError", "PriceParseError",
    "TapeFormatError", "TapelabError", "__version__", "analyze", "detect_out_of_sequence",
    "fit_trend", "price_from_decimal", "price_to_decimal", "read_tape", "report", "run_cli",
    "scenario_hash", "scenario_text", "simulate", "spearman", "tape_file_size", "write_tape",
]
