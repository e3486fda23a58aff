"""Decibel and dBm conversions, kept in one place so every module agrees."""

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0  # m/s


def db_to_linear(db):
    """Power ratio from dB."""
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def linear_to_db(ratio):
    """dB from a positive power ratio."""
    ratio = np.asarray(ratio, dtype=float)
    if np.any(ratio <= 0):
        raise ValueError("linear_to_db requires a positive ratio")
    return 10.0 * np.log10(ratio)


def dbm_to_watts(dbm):
    return 10.0 ** ((np.asarray(dbm, dtype=float) - 30.0) / 10.0)


def watts_to_dbm(watts):
    watts = np.asarray(watts, dtype=float)
    if np.any(watts <= 0):
        raise ValueError("watts_to_dbm requires positive power")
    return 10.0 * np.log10(watts) + 30.0


def wavelength_m(fc_ghz):
    """Carrier wavelength in meters for a frequency given in GHz."""
    if fc_ghz <= 0:
        raise ValueError("carrier frequency must be positive")
    return SPEED_OF_LIGHT / (fc_ghz * 1e9)
