"""CSV access for harness outputs: plain string tables, typed reads.

Every failure names what was missing (file, column, or value) so a batch
render over many CSVs points straight at the offending input.
"""

import csv


class DataError(ValueError):
    """The CSV lacks a row, column, or value the figure needs."""


def load_table(path: str):
    """Header and data rows of one CSV, all values kept as strings."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        rows = [dict(zip(header, record)) for record in reader if record]
    if not rows:
        raise DataError(f"{path}: no data rows")
    return header, rows


def column(rows, name: str, source: str = "table"):
    if name not in rows[0]:
        raise DataError(f"{source}: missing column {name!r}")
    return [row[name] for row in rows]


def floats(rows, name: str, source: str = "table"):
    """One column as floats; empty or malformed cells are named errors."""
    out = []
    for text in column(rows, name, source):
        try:
            out.append(float(text))
        except ValueError:
            raise DataError(
                f"{source}: column {name!r} has non-numeric value {text!r}"
            ) from None
    return out
