"""
CSV reading and writing.

Dialect: comma separated, mandatory header row, UTF-8, '.' decimal point,
no thousands separators, '\\n' line endings. Floats are written with 17
significant digits so a frame read back is bit-identical.
"""

import logging
from pathlib import Path

import numpy as np
import pandas as pd

from ..exceptions import CsvFormatError
from ..models.frame import TimeSeriesFrame

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"
LIST_SEPARATOR = ";"


class CsvProvider:
    """Reads observation frames and writes frames and result tables."""

    def __init__(self):
        self.logger = logging.getLogger(__name__)

    def read_frame(self, path: str | Path) -> TimeSeriesFrame:
        """Parse a numeric CSV into a frame.

        Raises:
            CsvFormatError: unreadable file, duplicate or missing header, non-numeric cells
            DataError: missing values or too few rows
        """
        try:
            header = pd.read_csv(path, header=None, nrows=1, dtype=str, encoding="utf-8")
        except (pd.errors.EmptyDataError, pd.errors.ParserError, UnicodeDecodeError) as e:
            raise CsvFormatError(f"Cannot read header of {path}: {e}") from e
        names = [str(n).strip() for n in header.iloc[0].tolist()]
        if any(n == "" or n == "nan" for n in names):
            raise CsvFormatError(f"{path}: empty column name in header")
        dupes = sorted({n for n in names if names.count(n) > 1})
        if dupes:
            raise CsvFormatError(f"{path}: duplicate column names {', '.join(dupes)}")

        try:
            df = pd.read_csv(
                path, float_precision="round_trip", encoding="utf-8", skipinitialspace=True
            )
        except (pd.errors.ParserError, UnicodeDecodeError) as e:
            raise CsvFormatError(f"Cannot parse {path}: {e}") from e
        try:
            values = df.to_numpy(dtype=float)
        except (TypeError, ValueError) as e:
            bad = [c for c in df.columns if not pd.api.types.is_numeric_dtype(df[c])]
            raise CsvFormatError(
                f"{path}: non-numeric values in column(s) {', '.join(map(str, bad))}"
            ) from e
        self.logger.info("Read %s: %d rows x %d columns", path, values.shape[0], values.shape[1])
        return TimeSeriesFrame(names=tuple(names), values=values)

    def write_frame(self, frame: TimeSeriesFrame, path: str | Path) -> Path:
        df = pd.DataFrame(np.asarray(frame.values), columns=list(frame.names))
        return self.write_table(df, path)

    def write_table(self, df: pd.DataFrame, path: str | Path) -> Path:
        """Write any result table in the package dialect. List cells are joined with ';'."""
        out = df.copy()
        for col in out.columns:
            if out[col].map(lambda v: isinstance(v, (list, tuple))).any():
                out[col] = out[col].map(
                    lambda v: LIST_SEPARATOR.join(map(str, v)) if isinstance(v, (list, tuple)) else v
                )
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        out.to_csv(target, index=False, float_format=FLOAT_FORMAT, lineterminator="\n", encoding="utf-8")
        self.logger.info("Wrote %s (%d rows)", target, len(out))
        return target

    def read_table(self, path: str | Path) -> pd.DataFrame:
        """Read a result table written by :meth:`write_table`; list cells stay joined strings."""
        return pd.read_csv(path, float_precision="round_trip", encoding="utf-8", keep_default_na=False)


csv_provider = CsvProvider()
