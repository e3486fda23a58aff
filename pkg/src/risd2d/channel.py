"""Propagation model: path loss, fading, and per-link channel realizations.

Three ingredients, all at millimeter-wave carrier frequencies:

  * direct tx -> rx coefficients with a distance power law and a
    Nakagami-m small-scale envelope,
  * two-hop tx -> element -> rx coefficients, Rician around a
    deterministic reflect component whose phase is set by the total
    travelled distance,
  * urban-microcell log-distance path loss feeding the scattered part.

A realization stores the direct matrix and the per-element reflect stack
separately so a surface configuration can be applied afterwards as a
weighted sum over elements.
"""

from dataclasses import dataclass

import numpy as np

from . import units
from .geometry import Scenario

# Above this Rician factor the scattered part is dropped entirely and the
# coefficient equals its deterministic component; used by tests to pin
# closed-form values.
PURE_REFLECT_BETA = 1e12


@dataclass(frozen=True)
class ChannelParams:
    """Physical-layer constants shared by every link in a drop."""

    fc_ghz: float = 28.0
    path_loss_exponent: float = 2.0  # direct and reflect amplitude decay
    rician_beta: float = 4.0  # linear power ratio, deterministic vs scattered
    nakagami_m: float = 3.0
    nakagami_omega: float = 1.0 / 3.0
    noise_psd_dbm_per_mhz: float = -134.0
    bandwidth_mhz: float = 1.0
    # Test seam: freeze every small-scale draw at its deterministic stand-in
    # (unit-power Nakagami envelope, no scattered reflect part).
    deterministic_small_scale: bool = False

    def __post_init__(self):
        if self.fc_ghz <= 0:
            raise ValueError("fc_ghz must be positive")
        if self.path_loss_exponent <= 0:
            raise ValueError("path_loss_exponent must be positive")
        if self.rician_beta < 0:
            raise ValueError("rician_beta must be >= 0")
        if self.nakagami_m < 0.5:
            raise ValueError("nakagami_m must be >= 0.5")
        if self.nakagami_omega <= 0:
            raise ValueError("nakagami_omega must be positive")
        if self.bandwidth_mhz <= 0:
            raise ValueError("bandwidth_mhz must be positive")

    @property
    def wavelength_m(self) -> float:
        return units.wavelength_m(self.fc_ghz)

    @property
    def noise_power_w(self) -> float:
        psd = self.noise_psd_dbm_per_mhz + 10.0 * np.log10(self.bandwidth_mhz)
        return float(units.dbm_to_watts(psd))


def path_loss_db(distance_m, fc_ghz: float, los: bool) -> np.ndarray:
    """Urban-microcell log-distance path loss in dB (fc in GHz, d in m)."""
    d = np.asarray(distance_m, dtype=float)
    if np.any(d <= 0):
        raise ValueError("path loss needs a positive distance")
    if los:
        return 22.0 * np.log10(d) + 28.0 + 20.0 * np.log10(fc_ghz)
    return 36.7 * np.log10(d) + 22.7 + 26.0 * np.log10(fc_ghz)


def reflect_los_coeff(d_in, d_out, wavelength_m: float, alpha: float) -> np.ndarray:
    """Deterministic two-hop coefficient for a tx -> element -> rx path.

    Amplitude follows the product of the two hop distances raised to
    -alpha/2; phase accumulates over the total travelled distance.
    """
    d_in = np.asarray(d_in, dtype=float)
    d_out = np.asarray(d_out, dtype=float)
    amp = (d_in * d_out) ** (-alpha / 2.0)
    phase = -2.0 * np.pi / wavelength_m * (d_in + d_out)
    return amp * np.exp(1j * phase)


def scattered_gain_linear(product_distance_m, fc_ghz: float) -> np.ndarray:
    """Linear power gain of the scattered reflect part at the product distance."""
    return 10.0 ** (-path_loss_db(product_distance_m, fc_ghz, los=False) / 10.0)


def reflect_channel_coeff(los, nlos_draw, pl_linear, beta: float):
    """Rician mix of a deterministic reflect path and a scattered draw.

    Above PURE_REFLECT_BETA the scattered term is dropped outright rather
    than left as a denormal-scale residue.
    """
    if beta < 0:
        raise ValueError("beta must be >= 0")
    los = np.asarray(los)
    if beta >= PURE_REFLECT_BETA:
        return los
    scattered = np.sqrt(np.asarray(pl_linear, dtype=float) / (1.0 + beta))
    return np.sqrt(beta / (1.0 + beta)) * los + scattered * np.asarray(nlos_draw)


def direct_channel_coeff(fading_draw, distance_m, alpha: float):
    """Single-hop coefficient: small-scale draw times the amplitude power law."""
    d = np.asarray(distance_m, dtype=float)
    if np.any(d <= 0):
        raise ValueError("direct path needs a positive distance")
    return np.asarray(fading_draw) * d ** (-alpha / 2.0)


def nakagami_envelope(rng: np.random.Generator, m: float, omega: float, size) -> np.ndarray:
    """Nakagami-m amplitude draws with E[envelope^2] = omega."""
    power = rng.gamma(shape=m, scale=omega / m, size=size)
    return np.sqrt(power)


@dataclass(frozen=True)
class ChannelRealization:
    """One fading draw for a scenario.

    direct : (L, L) complex, entry (i, j) is tx_j -> rx_i
    reflect : (K, L, L) complex, entry (k, i, j) is tx_j -> element k -> rx_i
              already folded across both hops, so applying a surface setting
              q (K complex units) gives the composite tensordot(q, reflect, 1)
    """

    direct: np.ndarray
    reflect: np.ndarray
    seed: int

    @property
    def n_links(self) -> int:
        return self.direct.shape[0]

    @property
    def n_elements(self) -> int:
        return self.reflect.shape[0]

    def composite(self, q: np.ndarray) -> np.ndarray:
        """Direct plus surface-reflected matrix for element settings q."""
        q = np.asarray(q)
        if q.shape != (self.n_elements,):
            raise ValueError(f"expected {self.n_elements} element settings, got {q.shape}")
        return self.direct + np.tensordot(q, self.reflect, axes=1)


def _pairwise_distances(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """(len(a), len(b)) Euclidean distances between two point sets."""
    diff = a[:, None, :] - b[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=-1))


def realize_channels(scenario: Scenario, params: ChannelParams, seed) -> ChannelRealization:
    """Draw the direct matrix and the reflect stack for one scenario.

    The seed (an integer or a numpy SeedSequence) is split into independent
    substreams for the direct and the reflected parts, so the direct draw
    does not depend on the element count and a surface-free receiver sees
    identical fading at any size or position of the surface.
    """
    if isinstance(seed, np.random.SeedSequence):
        ss = seed
    else:
        ss = np.random.SeedSequence(int(seed))
    seed_label = ss.entropy if isinstance(ss.entropy, int) else 0
    direct_ss, reflect_ss = ss.spawn(2)
    rng_direct = np.random.default_rng(direct_ss)
    rng_reflect = np.random.default_rng(reflect_ss)

    tx = scenario.tx_array()
    rx = scenario.rx_array()
    elems = scenario.ris.element_array()
    n = scenario.n_links
    k = elems.shape[0]
    alpha = params.path_loss_exponent

    # direct part: rows are receivers, columns are transmitters
    d_direct = _pairwise_distances(rx, tx)
    if params.deterministic_small_scale:
        envelope = np.full((n, n), np.sqrt(params.nakagami_omega))
        phase = np.zeros((n, n))
    else:
        envelope = nakagami_envelope(
            rng_direct, params.nakagami_m, params.nakagami_omega, (n, n)
        )
        phase = rng_direct.uniform(0.0, 2.0 * np.pi, size=(n, n))
    direct = direct_channel_coeff(envelope * np.exp(1j * phase), d_direct, alpha)

    # reflected part: hop distances per element, then Rician combine
    d_in = _pairwise_distances(elems, tx)  # (K, L) tx_j -> element k
    d_out = _pairwise_distances(elems, rx)  # (K, L) element k -> rx_i
    los = reflect_los_coeff(
        d_in[:, None, :], d_out[:, :, None], params.wavelength_m, alpha
    )  # (K, L, L) indexed (k, i, j)
    beta = params.rician_beta
    if params.deterministic_small_scale or beta >= PURE_REFLECT_BETA:
        reflect = los
    else:
        product = d_in[:, None, :] * d_out[:, :, None]
        g = scattered_gain_linear(product, params.fc_ghz)
        cn = (
            rng_reflect.standard_normal((k, n, n))
            + 1j * rng_reflect.standard_normal((k, n, n))
        ) / np.sqrt(2.0)
        reflect = reflect_channel_coeff(los, cn, g, beta)

    return ChannelRealization(direct=direct, reflect=reflect, seed=seed_label)
