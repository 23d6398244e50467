"""Decibel conversions and SI-suffixed number parsing."""

import re

import numpy as np

_SI_PREFIX = {
    "p": 1e-12,
    "n": 1e-9,
    "u": 1e-6,
    "µ": 1e-6,
    "m": 1e-3,
    "": 1.0,
    "k": 1e3,
    "K": 1e3,
    "M": 1e6,
    "G": 1e9,
    "T": 1e12,
}

_SI_RE = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([pnuµmkKMGT]?)\s*(?:Hz|hz)?\s*$")


def parse_si(text):
    """Parse a number with an optional SI prefix, e.g. ``"2.4G"`` or ``"177 MHz"``.

    Note that ``m`` means milli, so ``"1m"`` is ``1e-3``.
    """
    if isinstance(text, (int, float)):
        return float(text)
    match = _SI_RE.match(str(text))
    if match is None:
        raise ValueError(f"cannot parse {text!r} as a number")
    value, prefix = match.groups()
    return float(value) * _SI_PREFIX[prefix]


def to_db(ratio):
    """Power ratio to decibels."""
    return 10.0 * np.log10(ratio)


def from_db(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def watts_to_dbm(watts):
    return 10.0 * np.log10(watts) + 30.0


def dbm_to_watts(dbm):
    return 10.0 ** ((np.asarray(dbm, dtype=float) - 30.0) / 10.0)
