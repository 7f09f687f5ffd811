"""
CSV result tables.

Numbers are written with 17 significant digits and read back with pandas'
round-trip float parser, so parse(emit(x)) == x bitwise for doubles.
"""

from pathlib import Path

import pandas as pd

FLOAT_FORMAT = "%.17g"


def write_table(frame: pd.DataFrame, path: str | Path) -> Path:
    """
    Write a result table as CSV.

    Args:
        frame: Table to write
        path: Output path, parent directories are created

    Returns:
        The output path
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return path


def read_table(path: str | Path) -> pd.DataFrame:
    """Read a CSV written by write_table without losing float precision."""
    return pd.read_csv(path, float_precision="round_trip")


def vector_columns(prefix: str, size: int) -> list[str]:
    """Column names prefix0, prefix1, ..."""
    return [f"{prefix}{i}" for i in range(size)]
