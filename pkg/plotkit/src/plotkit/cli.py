"""plot: render simulator result CSVs as figures.

Single figure: ``plot --spec fig.json``. Whole results directory:
``plot --all --results DIR [--outdir DIR]``, which expects the seven
canonical CSV names the simulator writes by default.
"""

import argparse
import sys

from .figures import SpecError, load_spec, preset_specs, render
from .tables import DataError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plot",
        description="Render experiment CSVs as line sweeps, CDFs, and traces.",
    )
    parser.add_argument("--spec", metavar="PATH", help="JSON figure description")
    parser.add_argument(
        "--all", action="store_true", help="render every canonical figure"
    )
    parser.add_argument(
        "--results", metavar="DIR", help="directory of simulator CSVs (with --all)"
    )
    parser.add_argument(
        "--outdir", metavar="DIR", help="image directory (default: results dir)"
    )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.all:
            if not args.results:
                raise SpecError("--all needs --results DIR")
            if args.spec:
                raise SpecError("--spec and --all are mutually exclusive")
            specs = preset_specs(args.results, args.outdir or "")
        elif args.spec:
            specs = [load_spec(args.spec)]
        else:
            raise SpecError("nothing to do: give --spec PATH or --all --results DIR")
        for spec in specs:
            print(f"wrote {render(spec)}")
    except (SpecError, DataError) as exc:
        print(f"plot: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"plot: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
