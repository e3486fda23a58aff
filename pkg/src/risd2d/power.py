"""Power allocation under per-link SINR floors, by difference-of-convex descent.

The sum rate splits per link into f_i = g_i - phi_i with both parts concave
in the power vector.  Linearizing g_i at the current iterate gives a convex
surrogate that touches f_i there and upper-bounds it everywhere, so any
step that lowers the surrogate lowers the true objective (equivalently,
raises the sum rate).  Each solver iteration takes one projected gradient
step on the multiplier-weighted surrogate sum, backtracking the step until
the surrogate decreases, the sum rate does not drop, and no additional
link falls below its SINR floor; it then takes a projected step on the
nonnegative multipliers that price the floors.

Internals use a configurable log base (natural by default); reported rates
are always bits, base 2.  Steps live in normalized power units x = p/p_max,
so the default schedule delta0=50, mu0=100 with a halve-above-one floor is
scale-free.  The accept rule makes the sum-rate trace nondecreasing and
the below-floor count nonincreasing on every run, so a feasible starting
point only leads to feasible iterates.  Floors violated at the starting
point can only be restored along rate-nondecreasing paths, with the grown
multipliers steering the gradient toward them; whether the floors are met
at the returned point is reported, never repaired.
"""

from dataclasses import dataclass, field

import numpy as np

from . import metrics

DUAL_ASCENT = "ascent"  # multipliers grow with constraint violation
DUAL_REVERSE = "reverse"  # sign-flipped variant, kept for comparison runs


@dataclass(frozen=True)
class SolverSettings:
    p_max_w: float
    gamma_min_linear: float
    epsilon: float = 1e-3  # stop when an accepted step moves the rate less
    max_iters: int = 300
    delta0: float = 50.0  # initial primal step, normalized power units
    mu0: float = 100.0  # initial dual step
    lambda0: float = 100.0  # initial multiplier value, every link
    step_floor: float = 1.0  # halve delta and mu while above this
    log_base: float = float(np.e)
    dual_update: str = DUAL_ASCENT
    max_backtracks: int = 40  # step halvings per descent step
    max_stalls: int = 5  # consecutive moveless iterations before stopping

    def __post_init__(self):
        if self.p_max_w <= 0:
            raise ValueError("p_max_w must be positive")
        if self.gamma_min_linear < 0:
            raise ValueError("gamma_min_linear must be >= 0")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if min(self.delta0, self.mu0, self.step_floor) <= 0:
            raise ValueError("steps and the step floor must be positive")
        if self.lambda0 < 0:
            raise ValueError("lambda0 must be >= 0")
        if self.log_base <= 1:
            raise ValueError("log_base must exceed 1")
        if self.dual_update not in (DUAL_ASCENT, DUAL_REVERSE):
            raise ValueError(f"unknown dual_update {self.dual_update!r}")


def _interference(gains: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Per-receiver co-channel power, own link excluded."""
    return gains @ p - np.diag(gains) * p


def dc_parts(gains, sigma2: float, i: int, p, base: float = np.e):
    """Concave pair (g_i, phi_i) whose difference is -log(1 + SINR_i).

    g_i covers interference plus noise; phi_i adds the own-signal term.
    Link index i is 0-based.
    """
    gains = np.asarray(gains, dtype=float)
    p = np.asarray(p, dtype=float)
    if sigma2 <= 0:
        raise ValueError("sigma2 must be positive")
    ln_b = np.log(base)
    interf = float(gains[i] @ p - gains[i, i] * p[i])
    g_i = np.log(interf + sigma2) / ln_b
    phi_i = np.log(interf + gains[i, i] * p[i] + sigma2) / ln_b
    return g_i, phi_i


def _g_grad_rows(gains: np.ndarray, p: np.ndarray, sigma2: float, ln_b: float) -> np.ndarray:
    """(L, L) matrix of dg_i/dp_j; the diagonal is identically zero."""
    denom = _interference(gains, p) + sigma2
    rows = gains / (denom[:, None] * ln_b)
    np.fill_diagonal(rows, 0.0)
    return rows


def _phi_grad_rows(gains: np.ndarray, p: np.ndarray, sigma2: float, ln_b: float) -> np.ndarray:
    """(L, L) matrix of dphi_i/dp_j."""
    denom = gains @ p + sigma2
    return gains / (denom[:, None] * ln_b)


def surrogate(i: int, p, anchor, gains, sigma2: float, base: float = np.e) -> float:
    """Convex upper bound on f_i = g_i - phi_i, tight at the anchor.

    g_i is replaced by its first-order expansion around the anchor; by
    concavity the expansion dominates g_i, so the bound majorizes f_i over
    the whole box.
    """
    gains = np.asarray(gains, dtype=float)
    p = np.asarray(p, dtype=float)
    anchor = np.asarray(anchor, dtype=float)
    ln_b = np.log(base)
    g_a, _ = dc_parts(gains, sigma2, i, anchor, base)
    grad_g = _g_grad_rows(gains, anchor, sigma2, ln_b)[i]
    _, phi_p = dc_parts(gains, sigma2, i, p, base)
    return float(g_a + grad_g @ (p - anchor) - phi_p)


def _surrogate_vec(p, anchor, gains, sigma2: float, ln_b: float) -> np.ndarray:
    """All surrogate values at once; same math as surrogate()."""
    interf_a = _interference(gains, anchor) + sigma2
    g_a = np.log(interf_a) / ln_b
    grad_g = _g_grad_rows(gains, anchor, sigma2, ln_b)
    phi_p = np.log(gains @ p + sigma2) / ln_b
    return g_a + grad_g @ (p - anchor) - phi_p


def lagrangian_value(
    p, multipliers, anchor, gains, sigma2: float, gamma_min: float, base: float = np.e
) -> float:
    """Multiplier-weighted surrogate objective for the current anchor."""
    gains = np.asarray(gains, dtype=float)
    p = np.asarray(p, dtype=float)
    anchor = np.asarray(anchor, dtype=float)
    lam = np.asarray(multipliers, dtype=float)
    ln_b = np.log(base)
    f_hat = _surrogate_vec(p, anchor, gains, sigma2, ln_b)
    floor_term = np.log(gamma_min + 1.0) / ln_b
    return float(np.sum((1.0 + lam) * f_hat + lam * floor_term))


def lagrangian_grad_p(
    p, multipliers, anchor, gains, sigma2: float, gamma_min: float, base: float = np.e
) -> np.ndarray:
    """Closed-form gradient of the weighted surrogate objective in p.

    The linearized g-part contributes anchor-frozen constants; the phi-part
    is evaluated at p.  gamma_min enters the objective only through a term
    constant in p, so it does not appear here; the argument is kept so the
    call mirrors lagrangian_value.
    """
    del gamma_min
    gains = np.asarray(gains, dtype=float)
    p = np.asarray(p, dtype=float)
    anchor = np.asarray(anchor, dtype=float)
    lam = np.asarray(multipliers, dtype=float)
    if np.any(lam < 0):
        raise ValueError("multipliers must be nonnegative")
    ln_b = np.log(base)
    rows = _g_grad_rows(gains, anchor, sigma2, ln_b) - _phi_grad_rows(gains, p, sigma2, ln_b)
    return (1.0 + lam) @ rows


def projected_residual(x: np.ndarray, grad_x: np.ndarray) -> float:
    """Sup-norm of the unit-step projected-gradient residual on [0, 1]^L."""
    return float(np.max(np.abs(x - np.clip(x - grad_x, 0.0, 1.0))))


@dataclass(frozen=True)
class PowerStep:
    """One row of the solver trace (state after the iteration)."""

    iteration: int
    sum_rate: float
    p: np.ndarray
    multipliers: np.ndarray
    delta: float
    mu: float


@dataclass(frozen=True)
class PowerResult:
    p: np.ndarray  # watts, box-feasible
    sum_rate: float  # bits, base-2 logs
    multipliers: np.ndarray
    iterations: int
    converged: bool
    feasible: bool  # every SINR floor met at the returned point
    trace: tuple = field(repr=False, default=())


def allocate_power(gains, sigma2: float, settings: SolverSettings, p_init) -> PowerResult:
    """Run the difference-of-convex loop from p_init; see module docstring.

    Each iteration expands the surrogate at the current power and takes one
    projected gradient step with trial step delta, halving the step until
    the weighted surrogate decreases, the sum rate does not drop, and the
    number of links below their SINR floor does not grow; if no such step
    exists the power stays in place for this iteration.  The multipliers
    then take a projected dual step priced by the surrogate at the new
    power, and delta and mu halve while above the floor.  Iteration stops
    once an accepted move changes the rate by less than epsilon, after
    max_stalls consecutive moveless iterations (the iterate is then a
    fixpoint of the accept rule), or at max_iters.
    """
    gains = np.asarray(gains, dtype=float)
    p_init = np.asarray(p_init, dtype=float)
    if sigma2 <= 0:
        raise ValueError("sigma2 must be positive")
    if np.any(~np.isfinite(gains)) or np.any(gains < 0):
        raise ValueError("gains must be finite and nonnegative")
    n = gains.shape[0]
    if gains.shape != (n, n) or p_init.shape != (n,):
        raise ValueError("gains must be square and p_init must match it")
    p_max = settings.p_max_w
    if np.any(p_init < 0) or np.any(p_init > p_max * (1.0 + 1e-12)):
        raise ValueError("p_init must lie in [0, p_max]")

    ln_b = np.log(settings.log_base)
    gamma_min = settings.gamma_min_linear
    dead = np.diag(gains) == 0.0  # a dead link earns nothing at any power
    x = np.clip(p_init / p_max, 0.0, 1.0)
    x[dead] = 0.0
    lam = np.full(n, settings.lambda0, dtype=float)
    delta, mu = settings.delta0, settings.mu0
    scaled = gains * p_max  # gains in normalized power units
    floor_term = np.log(gamma_min + 1.0) / ln_b
    floor = gamma_min * (1.0 - metrics.FEASIBILITY_RTOL)

    def assess(xv):
        """Sum rate and the number of links below the SINR floor."""
        s = metrics.sinr(scaled, xv, sigma2)
        return float(np.sum(metrics.link_rates(s))), int(np.sum(s < floor))

    rate, below = assess(x)
    trace = [PowerStep(0, rate, x * p_max, lam.copy(), delta, mu)]
    converged = False
    stalls = 0
    iters = 0

    for n_iter in range(1, settings.max_iters + 1):
        iters = n_iter
        anchor = x
        grad = lagrangian_grad_p(x, lam, anchor, scaled, sigma2, gamma_min, settings.log_base)
        h = lagrangian_value(x, lam, anchor, scaled, sigma2, gamma_min, settings.log_base)
        step = delta
        moved = False
        new_rate, new_below = rate, below
        for _ in range(settings.max_backtracks):
            cand = np.clip(x - step * grad, 0.0, 1.0)
            cand[dead] = 0.0
            if not np.any(cand != x):
                break
            cand_rate, cand_below = assess(cand)
            if cand_below <= below and cand_rate >= rate:
                h_cand = lagrangian_value(
                    cand, lam, anchor, scaled, sigma2, gamma_min, settings.log_base
                )
                gap = np.max(np.abs(cand - x))
                if h_cand <= h - 1e-4 * gap * gap / step:
                    x, new_rate, new_below = cand, cand_rate, cand_below
                    moved = True
                    break
            step *= 0.5

        # projected multiplier update, priced at the (possibly unmoved) iterate
        f_hat = _surrogate_vec(x, anchor, scaled, sigma2, ln_b)
        violation = np.maximum(0.0, f_hat + floor_term)
        if settings.dual_update == DUAL_ASCENT:
            lam = np.maximum(0.0, lam + mu * violation)
        else:
            lam = np.maximum(0.0, lam - mu * violation)

        if delta > settings.step_floor:
            delta *= 0.5
        if mu > settings.step_floor:
            mu *= 0.5

        trace.append(PowerStep(n_iter, new_rate, x * p_max, lam.copy(), delta, mu))

        if moved and abs(new_rate - rate) < settings.epsilon:
            rate, below = new_rate, new_below
            converged = True
            break
        rate, below = new_rate, new_below

        if moved:
            stalls = 0
        else:
            stalls += 1
            if stalls >= settings.max_stalls:
                converged = True  # fixpoint of the accept rule, nothing to change
                break

    p = x * p_max
    sinrs = metrics.sinr(gains, p, sigma2)
    return PowerResult(
        p=p,
        sum_rate=rate,
        multipliers=lam,
        iterations=iters,
        converged=converged,
        feasible=metrics.is_feasible(sinrs, settings.gamma_min_linear),
        trace=tuple(trace),
    )
