"""Read the delimited record files the simulation harness writes.

This component talks to the simulation package only through its files:
a records CSV whose first line pins the schema version. Anything with a
different or absent schema line is refused rather than guessed at.
"""

from __future__ import annotations

import pandas as pd

SUPPORTED_SCHEMA = "1"

_RECORDS_LINE = "# recoloop-records schema=%s" % SUPPORTED_SCHEMA
_EXTRACT_LINE = "# recoloop-extract schema=%s" % SUPPORTED_SCHEMA


class SchemaError(ValueError):
    """The input file does not carry a schema version we understand."""


def read_records(path) -> pd.DataFrame:
    """Load a records or extract file, enforcing the schema line."""
    with open(path) as fh:
        first = fh.readline().strip()
    if first not in (_RECORDS_LINE, _EXTRACT_LINE):
        raise SchemaError(
            "unsupported schema line in %s: %r (this build reads schema %s)"
            % (path, first, SUPPORTED_SCHEMA)
        )
    return pd.read_csv(path, comment="#")


def require_columns(df: pd.DataFrame, columns) -> None:
    missing = [c for c in columns if c not in df.columns]
    if missing:
        raise SchemaError("input is missing required columns: %s" % ", ".join(missing))
