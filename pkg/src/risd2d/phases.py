"""Discrete surface control: quantized phase alphabets and coordinate search.

Each element carries one of 2^e phase values.  The search visits elements
in the flat grid order (outer row index first), evaluates the sum rate for
every candidate value of the visited element with all others frozen, and
commits only strict improvements that do not grow the set of links below
their SINR floor.  Sweeps repeat until a full pass commits nothing (or
once, in single-pass mode).
"""

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization

GRID_CLOSED = "closed"  # 2*m*pi/(2^e - 1): endpoints 0 and 2*pi both present
GRID_HALF_OPEN = "half-open"  # 2*m*pi/2^e: even spacing, 2*pi excluded

MODE_FIXPOINT = "fixpoint"  # sweep until a pass changes nothing
MODE_SINGLE = "single"  # exactly one sweep

MAX_PASSES = 10
_SINR_RTOL = 1e-9  # boundary slack when counting links below the floor


@dataclass(frozen=True)
class PhaseCandidateSet:
    """The 2^bits admissible phase values, in radians."""

    bits: int
    grid: str
    values: np.ndarray

    @property
    def count(self) -> int:
        return self.values.size


def quantized_phases(bits: int, grid: str = GRID_CLOSED) -> PhaseCandidateSet:
    """Candidate phases for a bits-wide element control word.

    The closed grid divides [0, 2*pi] into 2^bits - 1 steps, so its first
    and last values coincide modulo 2*pi (and bits=1 collapses to a single
    usable phase).  The half-open grid spaces 2^bits distinct values.
    """
    if bits < 1:
        raise ValueError("bits must be >= 1")
    m = np.arange(2 ** bits, dtype=float)
    if grid == GRID_CLOSED:
        values = 2.0 * m * np.pi / (2 ** bits - 1) if bits > 1 else m * 2.0 * np.pi
    elif grid == GRID_HALF_OPEN:
        values = 2.0 * m * np.pi / 2 ** bits
    else:
        raise ValueError(f"unknown grid {grid!r}")
    return PhaseCandidateSet(bits=bits, grid=grid, values=values)


@dataclass(frozen=True)
class PhaseConfig:
    """One phase index per element, flat grid order."""

    m: np.ndarray  # integer codewords in [0, 2^bits)
    candidates: PhaseCandidateSet

    def __post_init__(self):
        m = np.asarray(self.m)
        if m.ndim != 1 or not np.issubdtype(m.dtype, np.integer):
            raise ValueError("m must be a 1-D integer array")
        if np.any(m < 0) or np.any(m >= self.candidates.count):
            raise ValueError("codeword outside the candidate set")

    @property
    def n_elements(self) -> int:
        return self.m.size

    @property
    def thetas(self) -> np.ndarray:
        return self.candidates.values[self.m]

    @property
    def q(self) -> np.ndarray:
        """Unit-modulus element responses exp(j*theta)."""
        return np.exp(1j * self.thetas)


def random_phases(
    candidates: PhaseCandidateSet, n_elements: int, rng: np.random.Generator
) -> PhaseConfig:
    """Uniform draw over the candidate set, independently per element."""
    m = rng.integers(0, candidates.count, size=n_elements)
    return PhaseConfig(m=m, candidates=candidates)


@dataclass(frozen=True)
class PhaseSearchResult:
    phases: PhaseConfig
    sum_rate: float
    evaluations: int  # candidate sum-rate evaluations, 2^bits per element visit
    passes: int
    commits: int


def _batch_rates(gains: np.ndarray, p: np.ndarray, sigma2: float, gamma_min: float):
    """Sum rate and below-floor link count for a (C, L, L) stack of gains."""
    diag = np.diagonal(gains, axis1=1, axis2=2)
    signal = diag * p
    interference = gains @ p - signal
    s = signal / (interference + sigma2)
    rates = np.sum(np.log2(1.0 + s), axis=1)
    below = np.sum(s < gamma_min * (1.0 - _SINR_RTOL), axis=1)
    return rates, below


def local_search(
    realization: ChannelRealization,
    p: np.ndarray,
    theta_init: PhaseConfig,
    gamma_min_linear: float,
    sigma2: float,
    mode: str = MODE_FIXPOINT,
    max_passes: int = MAX_PASSES,
) -> PhaseSearchResult:
    """Coordinate-wise exhaustive search over element phases at fixed powers.

    A candidate replaces the incumbent value only if it strictly raises the
    sum rate without increasing the number of links below the SINR floor;
    among equally good candidates the smallest codeword wins and exact ties
    with the incumbent leave it in place.  The result is therefore
    deterministic, never worse than the input, and in fixpoint mode no
    single-element change can improve it further.
    """
    if mode not in (MODE_FIXPOINT, MODE_SINGLE):
        raise ValueError(f"unknown mode {mode!r}")
    if sigma2 <= 0:
        raise ValueError("sigma2 must be positive")
    p = np.asarray(p, dtype=float)
    k_total = realization.n_elements
    if theta_init.n_elements != k_total:
        raise ValueError("phase config does not match the element count")

    cand_q = np.exp(1j * theta_init.candidates.values)
    m = np.array(theta_init.m, copy=True)
    cur_q = cand_q[m]
    evaluations = 0
    commits = 0
    passes = 0
    limit = 1 if mode == MODE_SINGLE else max_passes

    for _ in range(limit):
        passes += 1
        changed = False
        for k in range(k_total):
            # rebuild the composite without element k, then add each candidate
            masked = cur_q.copy()
            masked[k] = 0.0
            base = realization.direct + np.tensordot(masked, realization.reflect, axes=1)
            stack = base[None, :, :] + cand_q[:, None, None] * realization.reflect[k][None, :, :]
            rates, below = _batch_rates(np.abs(stack) ** 2, p, sigma2, gamma_min_linear)
            evaluations += cand_q.size

            incumbent_rate = rates[m[k]]
            better = (below <= below[m[k]]) & (rates > incumbent_rate)
            if np.any(better):
                best_rate = np.max(rates[better])
                best_m = int(np.argmax(better & (rates == best_rate)))
                m[k] = best_m
                cur_q[k] = cand_q[best_m]
                changed = True
                commits += 1
        if not changed:
            break

    phases = PhaseConfig(m=m, candidates=theta_init.candidates)
    gains = np.abs(realization.composite(phases.q)) ** 2
    final_rate, _ = _batch_rates(gains[None, :, :], p, sigma2, gamma_min_linear)
    return PhaseSearchResult(
        phases=phases,
        sum_rate=float(final_rate[0]),
        evaluations=evaluations,
        passes=passes,
        commits=commits,
    )
