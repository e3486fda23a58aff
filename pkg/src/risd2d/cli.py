"""Command-line front end: sweeps, CDF and convergence studies, reruns.

Precedence per key: built-in defaults, then the study kind's defaults, then
the --config file, then explicit flags.  A manifest written next to any CSV
is itself a valid --config file, so ``risd2d run --config X.csv.manifest``
reproduces X byte for byte.
"""

import argparse
import sys

from . import experiments
from .experiments import ConfigError
from .optimize import SCHEMES
from .phases import GRID_CLOSED, GRID_HALF_OPEN, MODE_FIXPOINT, MODE_SINGLE
from .power import DUAL_ASCENT, DUAL_REVERSE

_KIND_BY_COMMAND = {
    "run": None,  # kind comes from the config file (default: single)
    "sweep-d2d": experiments.SWEEP_D2D,
    "sweep-elements": experiments.SWEEP_ELEMENTS,
    "sweep-bits": experiments.SWEEP_BITS,
    "sweep-sinr": experiments.SWEEP_SINR,
    "sweep-pos": experiments.SWEEP_POS,
    "cdf": experiments.CDF,
    "convergence": experiments.CONVERGENCE,
}

_HELP_BY_COMMAND = {
    "run": "run the study described by a config file or manifest",
    "sweep-d2d": "sum rate vs. number of D2D links",
    "sweep-elements": "sum rate vs. surface size N (N x N elements)",
    "sweep-bits": "sum rate vs. phase quantization bits",
    "sweep-sinr": "sum rate vs. minimum SINR requirement",
    "sweep-pos": "sum rate vs. surface deployment position",
    "cdf": "per-link achieved SINR distribution",
    "convergence": "outer-iteration traces across stop thresholds",
}

# flag destination -> config key (identity unless listed)
_FLAG_KEYS = {
    "seed": "base_seed",
    "d2d": "d2d_links",
    "elements": "n_per_side",
    "bits": "quant_bits",
    "min_sinr": "min_sinr_db",
    "pos": "ris_pos",
    "epsilon": "epsilon_outer",
    "phase_passes": "phase_mode",
}


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="PATH", help="config file or manifest to start from")
    parser.add_argument("--seed", type=int, metavar="U64", help="base seed (default 1)")
    parser.add_argument("--trials", type=int, metavar="INT", help="trials per sweep point")
    parser.add_argument("--out", metavar="PATH", help="output CSV path")
    parser.add_argument(
        "--schemes", metavar="LIST", help=f"comma list from: {','.join(SCHEMES)}"
    )
    parser.add_argument("--jobs", type=int, metavar="INT", help="parallel worker processes")
    parser.add_argument("--d2d", type=int, metavar="INT", help="number of D2D links")
    parser.add_argument("--elements", type=int, metavar="INT", help="surface side length N")
    parser.add_argument("--bits", type=int, metavar="INT", help="phase quantization bits e")
    parser.add_argument("--min-sinr", type=float, metavar="DB", help="per-link SINR floor in dB")
    parser.add_argument("--pos", type=float, metavar="M", help="surface corner y-coordinate")
    parser.add_argument("--sweep", metavar="LIST", help="comma list of swept axis values")
    parser.add_argument(
        "--epsilons", metavar="LIST", help="comma list of stop thresholds (convergence)"
    )
    parser.add_argument("--epsilon", type=float, metavar="EPS", help="outer stop threshold")
    parser.add_argument(
        "--phase-grid",
        choices=(GRID_CLOSED, GRID_HALF_OPEN),
        help="quantized phase grid form",
    )
    parser.add_argument(
        "--phase-passes",
        choices=(MODE_FIXPOINT, MODE_SINGLE),
        help="phase search sweeps: until stable, or exactly one",
    )
    parser.add_argument(
        "--dual-update",
        choices=(DUAL_ASCENT, DUAL_REVERSE),
        help="multiplier update direction in the power solver",
    )
    parser.add_argument(
        "--record-timing",
        action="store_true",
        default=None,
        help="fill wall_time_ms (makes reruns non-identical)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="risd2d",
        description="Link-level studies of a surface-assisted D2D underlay uplink.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for command, help_text in _HELP_BY_COMMAND.items():
        _add_common(sub.add_parser(command, help=help_text))
    return parser


def _overrides(args: argparse.Namespace) -> dict:
    values = {}
    if args.config:
        values.update(experiments.load_config(args.config))
    kind = _KIND_BY_COMMAND[args.command]
    if kind is not None:
        values["experiment"] = kind
    for dest in (
        "seed", "trials", "out", "schemes", "jobs", "d2d", "elements", "bits",
        "min_sinr", "pos", "sweep", "epsilons", "epsilon", "phase_grid",
        "phase_passes", "dual_update", "record_timing",
    ):
        given = getattr(args, dest)
        if given is None:
            continue
        key = _FLAG_KEYS.get(dest, dest)
        if key in ("schemes", "sweep", "epsilons"):
            given = experiments.parse_value(key, given)
        values[key] = given
    return values


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = experiments.make_config(**_overrides(args))
        csv_path, man_path = experiments.run_any(cfg)
    except ConfigError as exc:
        print(f"risd2d: config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"risd2d: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {csv_path}")
    print(f"wrote {man_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
