"""Alternating sum-rate maximization and the three comparison schemes.

One outer round tunes transmit powers with the surface frozen, then tunes
the surface with powers frozen.  Both sub-steps never lower the sum rate,
so the outer trace is nondecreasing and the loop stops once a full round
moves the rate by less than epsilon.

Comparison schemes reuse the same building blocks: mpt pins every power at
the maximum and only tunes phases, rps freezes the random initial phases
and only tunes powers, and without_ris removes the surface entirely.
"""

from dataclasses import dataclass, field

import numpy as np

from . import metrics, units
from .channel import ChannelParams, ChannelRealization
from .metrics import LinkReport
from .phases import (
    GRID_CLOSED,
    MODE_FIXPOINT,
    PhaseConfig,
    local_search,
    quantized_phases,
    random_phases,
)
from .power import DUAL_ASCENT, SolverSettings, allocate_power

PROPOSED = "proposed"
MPT = "mpt"  # maximum-power transmission: phases tuned, powers pinned
RPS = "rps"  # random phase shift: phases frozen at the initial draw
WITHOUT_RIS = "without_ris"
SCHEMES = (PROPOSED, MPT, RPS, WITHOUT_RIS)

_DEFAULT_CHANNEL = ChannelParams()


@dataclass(frozen=True)
class AlternationSettings:
    """Joint-solver knobs plus the link budget they optimize under."""

    p_max_w: float = float(units.dbm_to_watts(23.0))
    gamma_min_linear: float = float(units.db_to_linear(5.0))
    sigma2_w: float = _DEFAULT_CHANNEL.noise_power_w
    bits: int = 3
    phase_grid: str = GRID_CLOSED
    phase_mode: str = MODE_FIXPOINT
    epsilon_outer: float = 1e-3
    # The power stage stops a few multiples of epsilon_outer early so each
    # round leaves sub-threshold refinement to later rounds; a same-value
    # threshold collapses the alternation into too few rounds.
    epsilon_inner: float = 5e-3
    max_outer: int = 100
    dual_update: str = DUAL_ASCENT
    log_base: float = float(np.e)

    def __post_init__(self):
        if self.bits < 1:
            raise ValueError("bits must be >= 1")
        if self.epsilon_outer <= 0:
            raise ValueError("epsilon_outer must be positive")
        if self.max_outer < 1:
            raise ValueError("max_outer must be >= 1")
        self.power_settings()  # validates the shared numeric fields

    def power_settings(self) -> SolverSettings:
        return SolverSettings(
            p_max_w=self.p_max_w,
            gamma_min_linear=self.gamma_min_linear,
            epsilon=self.epsilon_inner,
            dual_update=self.dual_update,
            log_base=self.log_base,
        )


@dataclass(frozen=True)
class Solution:
    """Final operating point of one scheme plus its work counters."""

    scheme: str
    powers: np.ndarray
    phases: PhaseConfig  # None for the surface-free scheme
    report: LinkReport
    outer_iters: int
    inner_iters_total: int
    phase_evals: int
    converged: bool
    feasible: bool
    outer_trace: tuple = field(repr=False, default=())  # starts at the initial point

    @property
    def sum_rate(self) -> float:
        return self.report.sum_rate


def _initial_phases(realization: ChannelRealization, settings: AlternationSettings, rng):
    candidates = quantized_phases(settings.bits, settings.phase_grid)
    return random_phases(candidates, realization.n_elements, rng)


def maximize_sum_rate(
    realization: ChannelRealization, settings: AlternationSettings, rng: np.random.Generator
) -> Solution:
    """Alternate power allocation and phase search from (P_max, random phases)."""
    theta = _initial_phases(realization, settings, rng)
    n = realization.n_links
    p = np.full(n, settings.p_max_w)
    power_settings = settings.power_settings()

    gains = metrics.effective_gains(realization, theta.q)
    rate = metrics.sum_rate(gains, p, settings.sigma2_w)
    trace = [rate]
    inner_total = 0
    evals = 0
    converged = False
    outer = 0

    for outer in range(1, settings.max_outer + 1):
        power_res = allocate_power(gains, settings.sigma2_w, power_settings, p)
        p = power_res.p
        inner_total += power_res.iterations

        search = local_search(
            realization,
            p,
            theta,
            settings.gamma_min_linear,
            settings.sigma2_w,
            mode=settings.phase_mode,
        )
        theta = search.phases
        evals += search.evaluations

        gains = metrics.effective_gains(realization, theta.q)
        new_rate = metrics.sum_rate(gains, p, settings.sigma2_w)
        trace.append(new_rate)
        if abs(new_rate - rate) < settings.epsilon_outer:
            rate = new_rate
            converged = True
            break
        rate = new_rate

    report = metrics.evaluate(gains, p, settings.sigma2_w, settings.gamma_min_linear)
    return Solution(
        scheme=PROPOSED,
        powers=p,
        phases=theta,
        report=report,
        outer_iters=outer,
        inner_iters_total=inner_total,
        phase_evals=evals,
        converged=converged,
        feasible=report.feasible,
        outer_trace=tuple(trace),
    )


def _max_power_scheme(realization, settings, rng) -> Solution:
    theta = _initial_phases(realization, settings, rng)
    p = np.full(realization.n_links, settings.p_max_w)
    r0 = metrics.sum_rate(metrics.effective_gains(realization, theta.q), p, settings.sigma2_w)
    search = local_search(
        realization, p, theta, settings.gamma_min_linear, settings.sigma2_w,
        mode=settings.phase_mode,
    )
    gains = metrics.effective_gains(realization, search.phases.q)
    report = metrics.evaluate(gains, p, settings.sigma2_w, settings.gamma_min_linear)
    return Solution(
        scheme=MPT,
        powers=p,
        phases=search.phases,
        report=report,
        outer_iters=1,
        inner_iters_total=0,
        phase_evals=search.evaluations,
        converged=True,
        feasible=report.feasible,
        outer_trace=(r0, report.sum_rate),
    )


def _random_phase_scheme(realization, settings, rng) -> Solution:
    theta = _initial_phases(realization, settings, rng)
    gains = metrics.effective_gains(realization, theta.q)
    p0 = np.full(realization.n_links, settings.p_max_w)
    r0 = metrics.sum_rate(gains, p0, settings.sigma2_w)
    power_res = allocate_power(gains, settings.sigma2_w, settings.power_settings(), p0)
    report = metrics.evaluate(gains, power_res.p, settings.sigma2_w, settings.gamma_min_linear)
    return Solution(
        scheme=RPS,
        powers=power_res.p,
        phases=theta,
        report=report,
        outer_iters=1,
        inner_iters_total=power_res.iterations,
        phase_evals=0,
        converged=power_res.converged,
        feasible=report.feasible,
        outer_trace=(r0, report.sum_rate),
    )


def _no_surface_scheme(realization, settings, rng) -> Solution:
    del rng  # no phase draw: the surface contributes nothing here
    gains = np.abs(realization.direct) ** 2
    p0 = np.full(realization.n_links, settings.p_max_w)
    r0 = metrics.sum_rate(gains, p0, settings.sigma2_w)
    power_res = allocate_power(gains, settings.sigma2_w, settings.power_settings(), p0)
    report = metrics.evaluate(gains, power_res.p, settings.sigma2_w, settings.gamma_min_linear)
    return Solution(
        scheme=WITHOUT_RIS,
        powers=power_res.p,
        phases=None,
        report=report,
        outer_iters=1,
        inner_iters_total=power_res.iterations,
        phase_evals=0,
        converged=power_res.converged,
        feasible=report.feasible,
        outer_trace=(r0, report.sum_rate),
    )


_SCHEME_RUNNERS = {
    PROPOSED: maximize_sum_rate,
    MPT: _max_power_scheme,
    RPS: _random_phase_scheme,
    WITHOUT_RIS: _no_surface_scheme,
}


def run_scheme(
    scheme: str,
    realization: ChannelRealization,
    settings: AlternationSettings,
    rng: np.random.Generator,
) -> Solution:
    """Run one scheme; pass identically seeded rngs for paired phase draws."""
    try:
        runner = _SCHEME_RUNNERS[scheme]
    except KeyError:
        raise ValueError(f"unknown scheme {scheme!r}") from None
    return runner(realization, settings, rng)
