"""Link-level simulator and sum-rate optimizer for a cellular uplink where
device-to-device pairs share the band, assisted by a reconfigurable
reflecting surface with discrete per-element phase control."""

__version__ = "0.1.0"

from .channel import ChannelParams, ChannelRealization, path_loss_db, realize_channels
from .geometry import Position, Rect, RisGeometry, Scenario, ScenarioParams, sample_scenario
from .metrics import (
    LinkReport,
    effective_gains,
    evaluate,
    link_rates,
    sinr,
    sum_rate,
    violations,
)
from .optimize import (
    MPT,
    PROPOSED,
    RPS,
    SCHEMES,
    WITHOUT_RIS,
    AlternationSettings,
    Solution,
    maximize_sum_rate,
    run_scheme,
)
from .phases import (
    PhaseCandidateSet,
    PhaseConfig,
    PhaseSearchResult,
    local_search,
    quantized_phases,
    random_phases,
)
from .power import PowerResult, SolverSettings, allocate_power

__all__ = [
    "__version__",
    "ChannelParams",
    "ChannelRealization",
    "path_loss_db",
    "realize_channels",
    "Position",
    "Rect",
    "RisGeometry",
    "Scenario",
    "ScenarioParams",
    "sample_scenario",
    "LinkReport",
    "effective_gains",
    "evaluate",
    "link_rates",
    "sinr",
    "sum_rate",
    "violations",
    "MPT",
    "PROPOSED",
    "RPS",
    "SCHEMES",
    "WITHOUT_RIS",
    "AlternationSettings",
    "Solution",
    "maximize_sum_rate",
    "run_scheme",
    "PhaseCandidateSet",
    "PhaseConfig",
    "PhaseSearchResult",
    "local_search",
    "quantized_phases",
    "random_phases",
    "PowerResult",
    "SolverSettings",
    "allocate_power",
]
