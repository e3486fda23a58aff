"""Monte-Carlo experiment harness: sweeps, CDF and convergence studies.

Every run is driven by one flat ExperimentConfig and a base seed, and emits
a CSV plus a manifest.  The manifest holds the full configuration as plain
``key = value`` lines (rerunnable via ``--config``) and provenance entries
prefixed ``manifest_`` that the config parser skips, so (config, base_seed)
determines every output byte.

Per trial, seed ``base_seed XOR trial`` is split into three independent
substreams: node placement, channel fading, and the initial phase draw.
Every scheme at one trial consumes the identical channel realization and an
identically seeded phase stream, so comparisons are paired.
"""

import hashlib
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace

import numpy as np

from . import units
from .channel import ChannelParams, realize_channels
from .geometry import Rect, RisGeometry, ScenarioParams, sample_scenario
from .optimize import PROPOSED, SCHEMES, AlternationSettings, run_scheme
from .phases import GRID_CLOSED, GRID_HALF_OPEN, MODE_FIXPOINT, MODE_SINGLE
from .power import DUAL_ASCENT, DUAL_REVERSE

SINGLE = "single"
SWEEP_D2D = "sweep_d2d"
SWEEP_ELEMENTS = "sweep_elements"
SWEEP_BITS = "sweep_bits"
SWEEP_SINR = "sweep_sinr"
SWEEP_POS = "sweep_pos"
CDF = "cdf"
CONVERGENCE = "convergence"

KINDS = (SINGLE, SWEEP_D2D, SWEEP_ELEMENTS, SWEEP_BITS, SWEEP_SINR, SWEEP_POS, CDF, CONVERGENCE)

RESULT_COLUMNS = (
    "experiment",
    "scheme",
    "trial_seed",
    "d2d_links",
    "n_per_side",
    "quant_bits",
    "min_sinr_db",
    "ris_pos",
    "sum_rate_b2",
    "min_sinr_achieved_db",
    "outer_iters",
    "inner_iters_total",
    "phase_evals",
    "feasible",
    "converged",
    "wall_time_ms",
)
CDF_COLUMNS = (
    "experiment",
    "scheme",
    "trial_seed",
    "d2d_links",
    "n_per_side",
    "quant_bits",
    "min_sinr_db",
    "link_index",
    "link_kind",
    "sinr_db",
    "feasible",
)
TRACE_COLUMNS = (
    "experiment",
    "trial_seed",
    "epsilon",
    "outer_iter",
    "sum_rate_b2",
    "n_outer",
    "converged",
)

_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class ExperimentConfig:
    """Flat run description; every field maps to one config-file key."""

    experiment: str = SINGLE
    trials: int = 100
    base_seed: int = 1
    schemes: tuple = SCHEMES
    sweep: tuple = ()  # swept axis values; empty picks the kind's default
    epsilons: tuple = (1e-2, 1e-3, 1e-4)  # convergence study thresholds
    # point parameters (the swept one is overridden per sweep value)
    d2d_links: int = 4
    n_per_side: int = 4
    quant_bits: int = 3
    min_sinr_db: float = 5.0
    ris_pos: float = 0.0  # y-coordinate of the surface reference corner
    # radio constants
    fc_ghz: float = 28.0
    path_loss_exponent: float = 2.0
    rician_beta: float = 4.0
    nakagami_m: float = 3.0
    nakagami_omega: float = 1.0 / 3.0
    noise_psd_dbm_per_mhz: float = -134.0
    bandwidth_mhz: float = 1.0
    p_max_dbm: float = 23.0
    # deployment geometry
    area_x_min: float = 0.0
    area_x_max: float = 100.0
    area_y_min: float = -100.0
    area_y_max: float = 100.0
    cellular_distance: float = 10.0
    cellular_x: float = 5.0
    max_pair_distance: float = 10.0
    element_spacing: float = 0.03
    # solver knobs
    epsilon_outer: float = 1e-3
    epsilon_inner: float = 5e-3
    max_outer: int = 100
    phase_grid: str = GRID_CLOSED
    phase_mode: str = MODE_FIXPOINT
    dual_update: str = DUAL_ASCENT
    # harness
    record_timing: bool = False  # fills wall_time_ms; breaks byte-reproducibility
    jobs: int = 1
    out: str = ""  # output CSV path; empty derives <experiment>.csv


_DEFAULTS = ExperimentConfig()
_UNHASHED_KEYS = ("out", "jobs")  # execution details, not part of the science

# Fixed parameters each study kind uses unless the caller overrides them.
KIND_DEFAULTS = {
    SINGLE: {},
    SWEEP_D2D: {"d2d_links": 4},
    SWEEP_ELEMENTS: {"d2d_links": 3, "quant_bits": 3},
    SWEEP_BITS: {"d2d_links": 3, "n_per_side": 3},
    SWEEP_SINR: {"d2d_links": 3, "n_per_side": 4, "quant_bits": 3},
    SWEEP_POS: {"d2d_links": 3, "n_per_side": 3, "quant_bits": 3},
    CDF: {"d2d_links": 4, "n_per_side": 4, "quant_bits": 3},
    CONVERGENCE: {"d2d_links": 4, "n_per_side": 4, "quant_bits": 3},
}
DEFAULT_SWEEPS = {
    SWEEP_D2D: (1, 2, 3, 4, 5, 6),
    SWEEP_ELEMENTS: (2, 3, 4, 5, 6, 7, 8),
    SWEEP_BITS: (1, 2, 3, 4, 5, 6),
    SWEEP_SINR: (2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0),
    SWEEP_POS: (-100.0, -75.0, -50.0, -25.0, 0.0, 25.0, 50.0, 75.0, 100.0),
}
SWEEP_FIELD = {
    SWEEP_D2D: "d2d_links",
    SWEEP_ELEMENTS: "n_per_side",
    SWEEP_BITS: "quant_bits",
    SWEEP_SINR: "min_sinr_db",
    SWEEP_POS: "ris_pos",
}

_CHOICE_KEYS = {
    "experiment": KINDS,
    "phase_grid": (GRID_CLOSED, GRID_HALF_OPEN),
    "phase_mode": (MODE_FIXPOINT, MODE_SINGLE),
    "dual_update": (DUAL_ASCENT, DUAL_REVERSE),
}


class ConfigError(ValueError):
    """Bad config key or value; the message names the offender."""


def _parse_scalar(key: str, text: str):
    default = getattr(_DEFAULTS, key)
    text = text.strip()
    if isinstance(default, bool):
        if text.lower() in ("true", "1", "yes"):
            return True
        if text.lower() in ("false", "0", "no"):
            return False
        raise ConfigError(f"key {key!r}: expected a boolean, got {text!r}")
    if isinstance(default, int):
        try:
            return int(text)
        except ValueError as exc:
            raise ConfigError(f"key {key!r}: expected an integer, got {text!r}") from exc
    if isinstance(default, float):
        try:
            return float(text)
        except ValueError as exc:
            raise ConfigError(f"key {key!r}: expected a number, got {text!r}") from exc
    return text


def parse_value(key: str, text: str):
    """Parse one config-file value for a known key."""
    if not hasattr(_DEFAULTS, key):
        raise ConfigError(f"unknown config key {key!r}")
    if key == "schemes":
        return tuple(s.strip() for s in text.split(",") if s.strip())
    if key == "sweep":
        return tuple(float(v) for v in text.split(",") if v.strip())
    if key == "epsilons":
        return tuple(float(v) for v in text.split(",") if v.strip())
    return _parse_scalar(key, text)


def load_config(path: str) -> dict:
    """Read ``key = value`` lines; comments, blanks, and manifest_* are skipped."""
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
            key, _, text = line.partition("=")
            key = key.strip()
            if key.startswith("manifest_"):
                continue
            values[key] = parse_value(key, text)
    return values


def make_config(**overrides) -> ExperimentConfig:
    """Build a validated config: kind defaults first, explicit values on top."""
    kind = overrides.get("experiment", _DEFAULTS.experiment)
    if kind not in KINDS:
        raise ConfigError(f"key 'experiment': unknown kind {kind!r}")
    merged = dict(KIND_DEFAULTS[kind])
    for key, value in overrides.items():
        if not hasattr(_DEFAULTS, key):
            raise ConfigError(f"unknown config key {key!r}")
        merged[key] = value
    cfg = replace(_DEFAULTS, **merged)
    _validate(cfg)
    return cfg


def _validate(cfg: ExperimentConfig) -> None:
    if cfg.trials < 1:
        raise ConfigError("key 'trials': must be >= 1")
    if not cfg.schemes:
        raise ConfigError("key 'schemes': at least one scheme required")
    for s in cfg.schemes:
        if s not in SCHEMES:
            raise ConfigError(f"key 'schemes': unknown scheme {s!r}")
    for key, choices in _CHOICE_KEYS.items():
        if getattr(cfg, key) not in choices:
            raise ConfigError(f"key {key!r}: must be one of {', '.join(choices)}")
    if cfg.experiment == CONVERGENCE and not cfg.epsilons:
        raise ConfigError("key 'epsilons': at least one threshold required")
    if cfg.jobs < 1:
        raise ConfigError("key 'jobs': must be >= 1")
    if not (cfg.base_seed & _SEED_MASK) == cfg.base_seed:
        raise ConfigError("key 'base_seed': must fit in 64 bits and be >= 0")


def sweep_values(cfg: ExperimentConfig) -> tuple:
    """Effective sweep axis for the config's kind (None point for non-sweeps)."""
    if cfg.experiment not in SWEEP_FIELD:
        return (None,)
    values = cfg.sweep if cfg.sweep else DEFAULT_SWEEPS[cfg.experiment]
    field_name = SWEEP_FIELD[cfg.experiment]
    if isinstance(getattr(_DEFAULTS, field_name), int):
        cast = []
        for v in values:
            if float(v) != int(v):
                raise ConfigError(f"key 'sweep': {field_name} takes integers, got {v}")
            cast.append(int(v))
        return tuple(cast)
    return tuple(float(v) for v in values)


def _point_config(cfg: ExperimentConfig, value) -> ExperimentConfig:
    if value is None:
        return cfg
    return replace(cfg, **{SWEEP_FIELD[cfg.experiment]: value})


def _build(cfg: ExperimentConfig):
    """Materialize the simulation objects for one sweep point."""
    area = Rect(cfg.area_x_min, cfg.area_x_max, cfg.area_y_min, cfg.area_y_max)
    scenario_params = ScenarioParams(
        n_d2d=cfg.d2d_links,
        area=area,
        cellular_distance=cfg.cellular_distance,
        cellular_x=cfg.cellular_x,
        max_pair_distance=cfg.max_pair_distance,
    )
    ris = RisGeometry(
        n_per_side=cfg.n_per_side,
        d_ye=cfg.element_spacing,
        d_ze=cfg.element_spacing,
        y_offset=cfg.ris_pos,
    )
    chan = ChannelParams(
        fc_ghz=cfg.fc_ghz,
        path_loss_exponent=cfg.path_loss_exponent,
        rician_beta=cfg.rician_beta,
        nakagami_m=cfg.nakagami_m,
        nakagami_omega=cfg.nakagami_omega,
        noise_psd_dbm_per_mhz=cfg.noise_psd_dbm_per_mhz,
        bandwidth_mhz=cfg.bandwidth_mhz,
    )
    settings = AlternationSettings(
        p_max_w=float(units.dbm_to_watts(cfg.p_max_dbm)),
        gamma_min_linear=float(units.db_to_linear(cfg.min_sinr_db)),
        sigma2_w=chan.noise_power_w,
        bits=cfg.quant_bits,
        phase_grid=cfg.phase_grid,
        phase_mode=cfg.phase_mode,
        epsilon_outer=cfg.epsilon_outer,
        epsilon_inner=cfg.epsilon_inner,
        max_outer=cfg.max_outer,
        dual_update=cfg.dual_update,
    )
    return scenario_params, ris, chan, settings


def trial_seed(base_seed: int, trial: int) -> int:
    return (base_seed ^ trial) & _SEED_MASK


def _trial_setup(cfg: ExperimentConfig, trial: int):
    """Scenario, realization, settings, and the shared phase substream."""
    scenario_params, ris, chan, settings = _build(cfg)
    seed = trial_seed(cfg.base_seed, trial)
    scen_ss, chan_ss, phase_ss = np.random.SeedSequence(seed).spawn(3)
    scenario = sample_scenario(scenario_params, ris, scen_ss)
    realization = realize_channels(scenario, chan, chan_ss)
    return seed, scenario, realization, settings, phase_ss


def _result_task(args):
    cfg, rank, trial = args
    seed, _, realization, settings, phase_ss = _trial_setup(cfg, trial)
    rows = []
    for scheme in cfg.schemes:
        started = time.perf_counter() if cfg.record_timing else None
        sol = run_scheme(scheme, realization, settings, np.random.default_rng(phase_ss))
        wall_ms = (time.perf_counter() - started) * 1e3 if started is not None else None
        min_db = (
            float(units.linear_to_db(sol.report.min_sinr))
            if sol.report.min_sinr > 0
            else float("-inf")
        )
        rows.append(
            (
                (rank, trial, SCHEMES.index(scheme)),
                (
                    cfg.experiment,
                    scheme,
                    seed,
                    cfg.d2d_links,
                    cfg.n_per_side,
                    cfg.quant_bits,
                    cfg.min_sinr_db,
                    cfg.ris_pos,
                    sol.sum_rate,
                    min_db,
                    sol.outer_iters,
                    sol.inner_iters_total,
                    sol.phase_evals,
                    sol.feasible,
                    sol.converged,
                    wall_ms,
                ),
            )
        )
    return rows


def _cdf_task(args):
    cfg, rank, trial = args
    seed, scenario, realization, settings, phase_ss = _trial_setup(cfg, trial)
    rows = []
    for scheme in cfg.schemes:
        sol = run_scheme(scheme, realization, settings, np.random.default_rng(phase_ss))
        for link, s in zip(scenario.links, sol.report.sinr):
            sinr_db = float(units.linear_to_db(s)) if s > 0 else float("-inf")
            rows.append(
                (
                    (rank, trial, SCHEMES.index(scheme), link.index),
                    (
                        cfg.experiment,
                        scheme,
                        seed,
                        cfg.d2d_links,
                        cfg.n_per_side,
                        cfg.quant_bits,
                        cfg.min_sinr_db,
                        link.index,
                        link.kind,
                        sinr_db,
                        sol.feasible,
                    ),
                )
            )
    return rows


def _trace_task(args):
    cfg, rank, trial = args
    seed, _, realization, settings, phase_ss = _trial_setup(cfg, trial)
    sol = run_scheme(PROPOSED, realization, settings, np.random.default_rng(phase_ss))
    rows = []
    for it, rate in enumerate(sol.outer_trace):
        rows.append(
            (
                (rank, trial, it),
                (cfg.experiment, seed, cfg.epsilon_outer, it, rate, sol.outer_iters, sol.converged),
            )
        )
    return rows


def _run_tasks(task_fn, tasks, jobs: int):
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = pool.map(task_fn, tasks, chunksize=max(1, len(tasks) // (jobs * 4)))
            nested = list(chunks)
    else:
        nested = [task_fn(t) for t in tasks]
    rows = [row for chunk in nested for row in chunk]
    rows.sort(key=lambda r: r[0])
    return [r[1] for r in rows]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.12g" % value
    return str(value)


def _write_csv(path: str, columns, rows) -> None:
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _cfg_fmt(value) -> str:
    # repr round-trips floats exactly; %.12g would perturb reloaded configs
    if isinstance(value, float):
        return repr(value)
    return _fmt(value)


def config_lines(cfg: ExperimentConfig) -> list:
    """Canonical ``key = value`` serialization (excludes execution-only keys)."""
    lines = []
    for f in fields(cfg):
        if f.name in _UNHASHED_KEYS:
            continue
        value = getattr(cfg, f.name)
        if f.name == "schemes":
            text = ",".join(value)
        elif f.name in ("sweep", "epsilons"):
            text = ",".join(_cfg_fmt(v) for v in value)
        else:
            text = _cfg_fmt(value)
        lines.append(f"{f.name} = {text}")
    return lines


def config_digest(cfg: ExperimentConfig) -> str:
    blob = "\n".join(config_lines(cfg)).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()


def manifest_path(csv_path: str) -> str:
    return csv_path + ".manifest"


def _write_manifest(csv_path: str, cfg: ExperimentConfig, columns, n_rows: int) -> str:
    from . import __version__

    path = manifest_path(csv_path)
    lines = ["# rerun with: risd2d run --config <this file> [--out PATH]"]
    lines += config_lines(cfg)
    lines += [
        f"manifest_code_version = {__version__}",
        f"manifest_config_sha256 = {config_digest(cfg)}",
        f"manifest_csv = {os.path.basename(csv_path)}",
        f"manifest_rows = {n_rows}",
        f"manifest_columns = {','.join(columns)}",
        f"manifest_jobs = {cfg.jobs}",
    ]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def _out_path(cfg: ExperimentConfig) -> str:
    return cfg.out if cfg.out else f"{cfg.experiment}.csv"


def run_experiment(cfg: ExperimentConfig):
    """Sweep or single-point study; one row per (sweep point, trial, scheme)."""
    if cfg.experiment in (CDF, CONVERGENCE):
        raise ConfigError(f"run_experiment does not handle kind {cfg.experiment!r}")
    _validate(cfg)
    tasks = [
        (_point_config(cfg, value), rank, trial)
        for rank, value in enumerate(sweep_values(cfg))
        for trial in range(cfg.trials)
    ]
    rows = _run_tasks(_result_task, tasks, cfg.jobs)
    csv_path = _out_path(cfg)
    _write_csv(csv_path, RESULT_COLUMNS, rows)
    return csv_path, _write_manifest(csv_path, cfg, RESULT_COLUMNS, len(rows))


def run_cdf(cfg: ExperimentConfig):
    """Per-link achieved SINR study; one row per link per trial per scheme."""
    if cfg.experiment != CDF:
        raise ConfigError(f"run_cdf requires kind {CDF!r}, got {cfg.experiment!r}")
    _validate(cfg)
    tasks = [(cfg, 0, trial) for trial in range(cfg.trials)]
    rows = _run_tasks(_cdf_task, tasks, cfg.jobs)
    csv_path = _out_path(cfg)
    _write_csv(csv_path, CDF_COLUMNS, rows)
    return csv_path, _write_manifest(csv_path, cfg, CDF_COLUMNS, len(rows))


def run_convergence(cfg: ExperimentConfig):
    """Outer-iteration sum-rate traces across stop thresholds."""
    if cfg.experiment != CONVERGENCE:
        raise ConfigError(f"run_convergence requires kind {CONVERGENCE!r}, got {cfg.experiment!r}")
    _validate(cfg)
    tasks = [
        (replace(cfg, epsilon_outer=eps), rank, trial)
        for rank, eps in enumerate(cfg.epsilons)
        for trial in range(cfg.trials)
    ]
    rows = _run_tasks(_trace_task, tasks, cfg.jobs)
    csv_path = _out_path(cfg)
    _write_csv(csv_path, TRACE_COLUMNS, rows)
    return csv_path, _write_manifest(csv_path, cfg, TRACE_COLUMNS, len(rows))


def run_any(cfg: ExperimentConfig):
    """Dispatch on the config's experiment kind."""
    if cfg.experiment == CDF:
        return run_cdf(cfg)
    if cfg.experiment == CONVERGENCE:
        return run_convergence(cfg)
    return run_experiment(cfg)


def load_rows(path: str):
    """Read one of our CSVs back as (columns, list of per-row dicts of strings)."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [line.rstrip("\n") for line in fh]
    if not lines:
        raise ValueError(f"{path}: empty file")
    columns = lines[0].split(",")
    rows = [dict(zip(columns, line.split(","))) for line in lines[1:] if line]
    return columns, rows
