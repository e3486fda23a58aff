"""Shared builders for deterministic tiny instances."""

import numpy as np

from risd2d.channel import ChannelParams, realize_channels
from risd2d.geometry import RisGeometry, ScenarioParams, sample_scenario


def make_realization(n_d2d=1, n_per_side=2, seed=7, **channel_kwargs):
    """One seeded scenario plus channels, small enough for exhaustive checks."""
    ss = np.random.SeedSequence(seed)
    scen_ss, chan_ss = ss.spawn(2)
    scenario = sample_scenario(
        ScenarioParams(n_d2d=n_d2d), RisGeometry(n_per_side=n_per_side), scen_ss
    )
    params = ChannelParams(**channel_kwargs)
    return scenario, realize_channels(scenario, params, chan_ss)


def random_gain_matrix(rng, n, scale=1.0):
    """Positive interference matrix with a dominant-ish diagonal."""
    gains = rng.uniform(0.05, 1.0, size=(n, n)) * scale
    gains[np.diag_indices(n)] = rng.uniform(0.5, 2.0, size=n) * scale
    return gains
