"""Link-quality metrics: effective gains, SINR, rates, and feasibility.

Everything downstream (power control, phase search, experiments, tests)
evaluates candidate operating points through these few functions, so the
objective is defined in exactly one place.
"""

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization

# Relative slack when checking a minimum-SINR constraint; power control can
# land on the boundary to the last ulp.
FEASIBILITY_RTOL = 1e-9


def effective_gains(realization: ChannelRealization, q: np.ndarray) -> np.ndarray:
    """(L, L) power gains |direct + reflected|^2 under element settings q."""
    h = realization.composite(q)
    return np.abs(h) ** 2


def sinr(gains: np.ndarray, powers: np.ndarray, noise_power_w: float) -> np.ndarray:
    """Per-link SINR; gains[i, j] couples transmitter j into receiver i."""
    gains = np.asarray(gains, dtype=float)
    powers = np.asarray(powers, dtype=float)
    if np.any(powers < 0):
        raise ValueError("transmit powers must be nonnegative")
    signal = np.diag(gains) * powers
    interference = gains @ powers - signal
    return signal / (interference + noise_power_w)


def link_rates(sinrs: np.ndarray) -> np.ndarray:
    """Spectral efficiency per link in bit/s/Hz."""
    return np.log2(1.0 + np.asarray(sinrs, dtype=float))


def sum_rate(gains: np.ndarray, powers: np.ndarray, noise_power_w: float) -> float:
    return float(np.sum(link_rates(sinr(gains, powers, noise_power_w))))


def is_feasible(sinrs: np.ndarray, min_sinr_linear: float, rtol: float = FEASIBILITY_RTOL) -> bool:
    """Whether every link meets its SINR floor, boundary inclusive."""
    return bool(np.all(np.asarray(sinrs) >= min_sinr_linear * (1.0 - rtol)))


SINR_FLOOR = "sinr_floor"
POWER_BOX = "power_box"


def violations(
    sinrs: np.ndarray,
    powers: np.ndarray,
    min_sinr_linear: float,
    p_max_w: float,
    rtol: float = FEASIBILITY_RTOL,
) -> tuple:
    """Every violated constraint as (kind, 1-based link index), both inclusive
    of their boundary up to rtol; an empty tuple means a feasible point."""
    s = np.asarray(sinrs, dtype=float)
    p = np.asarray(powers, dtype=float)
    floor = min_sinr_linear * (1.0 - rtol)
    cap = p_max_w * (1.0 + rtol)
    out = []
    for i in range(len(p)):
        if s[i] < floor:
            out.append((SINR_FLOOR, i + 1))
        if p[i] < 0.0 or p[i] > cap:
            out.append((POWER_BOX, i + 1))
    return tuple(out)


@dataclass(frozen=True)
class LinkReport:
    """Snapshot of one operating point (gains, powers) for reporting."""

    sinr: np.ndarray
    rates: np.ndarray
    sum_rate: float
    min_sinr: float
    feasible: bool


def evaluate(
    gains: np.ndarray,
    powers: np.ndarray,
    noise_power_w: float,
    min_sinr_linear: float,
) -> LinkReport:
    s = sinr(gains, powers, noise_power_w)
    r = link_rates(s)
    return LinkReport(
        sinr=s,
        rates=r,
        sum_rate=float(np.sum(r)),
        min_sinr=float(np.min(s)),
        feasible=is_feasible(s, min_sinr_linear),
    )
