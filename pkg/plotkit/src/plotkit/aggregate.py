"""Grouped statistics behind the figures.

This layer only summarizes columns the simulator already wrote; nothing
here recomputes rates or SINRs.
"""

import math

from .tables import DataError, floats


def mean(values) -> float:
    return sum(values) / len(values)


def std_error(values) -> float:
    """Standard error of the mean; zero for a single sample."""
    n = len(values)
    if n < 2:
        return 0.0
    m = mean(values)
    var = sum((v - m) ** 2 for v in values) / (n - 1)
    return math.sqrt(var / n)


def line_sweep(rows, x: str, y: str, group: str, source: str = "table"):
    """Per-group sweep curves: sorted x, mean of y, standard error of y.

    Returns {group value: (xs, means, errors)} with xs ascending.
    """
    xs = floats(rows, x, source)
    ys = floats(rows, y, source)
    gs = [row[group] for row in rows] if group in rows[0] else None
    if gs is None:
        raise DataError(f"{source}: missing column {group!r}")

    buckets = {}
    for gv, xv, yv in zip(gs, xs, ys):
        buckets.setdefault(gv, {}).setdefault(xv, []).append(yv)

    out = {}
    for gv, by_x in buckets.items():
        axis = sorted(by_x)
        out[gv] = (
            axis,
            [mean(by_x[xv]) for xv in axis],
            [std_error(by_x[xv]) for xv in axis],
        )
    return out


def ecdf(rows, value: str, group: str, source: str = "table"):
    """Per-group empirical CDF evaluated at the finite sample points.

    Returns {group value: (xs, fractions)}. Non-finite samples (links
    with zero SINR print as -inf) stay in the denominator, so a curve
    may start above zero; it ends at 1.0 whenever the largest sample is
    finite.
    """
    vals = floats(rows, value, source)
    gs = [row[group] for row in rows] if group in rows[0] else None
    if gs is None:
        raise DataError(f"{source}: missing column {group!r}")

    samples = {}
    for gv, v in zip(gs, vals):
        samples.setdefault(gv, []).append(v)

    out = {}
    for gv, data in samples.items():
        data.sort()
        total = len(data)
        xs, fracs = [], []
        for i, v in enumerate(data):
            if not math.isfinite(v):
                continue
            if xs and v == xs[-1]:
                fracs[-1] = (i + 1) / total
            else:
                xs.append(v)
                fracs.append((i + 1) / total)
        if not xs:
            raise DataError(f"{source}: group {gv!r} has no finite {value!r}")
        out[gv] = (xs, fracs)
    return out


def traces(rows, x: str, y: str, group: str, source: str = "table"):
    """Mean trajectory of y over x per group, averaged across trials.

    Trials stop at different lengths, so each x position averages only
    the trials that reached it.
    """
    xs = floats(rows, x, source)
    ys = floats(rows, y, source)
    gs = [row[group] for row in rows] if group in rows[0] else None
    if gs is None:
        raise DataError(f"{source}: missing column {group!r}")

    buckets = {}
    for gv, xv, yv in zip(gs, xs, ys):
        buckets.setdefault(gv, {}).setdefault(xv, []).append(yv)

    out = {}
    for gv, by_x in buckets.items():
        axis = sorted(by_x)
        out[gv] = (axis, [mean(by_x[xv]) for xv in axis])
    return out
