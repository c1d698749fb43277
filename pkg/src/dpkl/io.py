"""Reading numeric data files and writing reports."""

import csv
import io
import json
import math
import re

import numpy as np

from .exceptions import InputError

_TOKEN = re.compile(r"[^\s,]+")


class DataParseError(InputError):
    """A token in a data file is not a finite real number."""

    def __init__(self, message, line, column, token):
        super().__init__(message)
        self.line = line
        self.column = column
        self.token = token


def parse_numbers(text, source="<input>"):
    """Parse whitespace- or comma-separated reals, keeping their order."""
    values = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        for match in _TOKEN.finditer(line):
            token = match.group()
            col = match.start() + 1
            try:
                value = float(token)
            except ValueError:
                raise DataParseError(
                    f"{source}:{lineno}:{col}: cannot parse {token!r} as a number",
                    lineno, col, token,
                ) from None
            if not math.isfinite(value):
                raise DataParseError(
                    f"{source}:{lineno}:{col}: non-finite value {token!r}", lineno, col, token
                )
            values.append(value)
    if not values:
        raise InputError(f"{source}: no numeric values found")
    return np.array(values)


def ingest(path):
    """Read a plain-text numeric data file into a float array."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_numbers(text, source=str(path))


def fmt(value):
    """Full-precision text for a number (shortest round-tripping repr)."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return repr(value)


def fmt4(value):
    """Four-decimal display value, as in published tables."""
    return "" if value is None else f"{float(value):.4f}"


def dump_json(document):
    return json.dumps(document, indent=2, allow_nan=False) + "\n"


def dump_tsv(header, rows, comments=()):
    buf = io.StringIO()
    for line in comments:
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, delimiter="\t", lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) if not isinstance(v, str) else v for v in row])
    return buf.getvalue()
