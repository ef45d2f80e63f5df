"""CSV reading and writing for numeric tables and experiment reports."""

import csv
import logging
import math
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..model.exceptions import MalformedCSVError

FLOAT_FORMAT = '%.17g'


def format_value(value) -> str:
    """Render one cell; floats keep 17 significant digits."""
    if value is None:
        return ''
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return 'nan'
        return FLOAT_FORMAT % value
    return str(value)


class CSVHandler:
    """Handle CSV processing."""

    def __init__(self, csv_path: str):
        self.csv_path = Path(csv_path)

    def read_records(self) -> List[Dict[str, str]]:
        """Read records from CSV file."""
        with open(self.csv_path, 'r', newline='') as f:
            return list(csv.DictReader(f))

    def read_table(self, expected_columns: Optional[Sequence[str]] = None,
                   min_columns: int = 1) -> Tuple[List[str], np.ndarray]:
        """Read a header row followed by numeric rows.

        Raises MalformedCSVError carrying the 1-based line of the first bad row.
        """
        with open(self.csv_path, 'r', newline='') as f:
            reader = csv.reader(f)
            header = next(reader, None)
            if header is None or not any(cell.strip() for cell in header):
                raise MalformedCSVError("missing header row", line=1)
            header = [cell.strip() for cell in header]
            if expected_columns is not None and header != list(expected_columns):
                raise MalformedCSVError(
                    f"expected columns {', '.join(expected_columns)}, got {', '.join(header)}", line=1)
            if len(header) < min_columns:
                raise MalformedCSVError(f"expected at least {min_columns} columns, got {len(header)}", line=1)

            rows = []
            for row in reader:
                line = reader.line_num
                if not row or all(not cell.strip() for cell in row):
                    continue
                if len(row) != len(header):
                    raise MalformedCSVError(f"expected {len(header)} fields, got {len(row)}", line=line)
                try:
                    values = [float(cell) for cell in row]
                except ValueError:
                    raise MalformedCSVError(f"non-numeric field in {row}", line=line)
                if not all(math.isfinite(v) for v in values):
                    raise MalformedCSVError("non-finite field", line=line)
                rows.append(values)

        if not rows:
            raise MalformedCSVError("no data rows", line=2)
        logging.debug(f"Read {len(rows)} rows x {len(header)} columns from {self.csv_path}")
        return header, np.array(rows, dtype=float)

    def write_rows(self, fieldnames: Sequence[str], rows: Iterable[Sequence]) -> int:
        """Write a header and rows, replacing any existing file.

        Returns the number of data rows written.
        """
        self.csv_path.parent.mkdir(parents=True, exist_ok=True)
        count = 0
        with open(self.csv_path, 'w', newline='') as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(fieldnames)
            for row in rows:
                writer.writerow([format_value(v) for v in row])
                count += 1
        logging.debug(f"Wrote {count} rows to {self.csv_path}")
        return count

    def write_records(self, fieldnames: Sequence[str], records: Iterable[Dict]) -> int:
        """Write dictionaries keyed by fieldnames."""
        return self.write_rows(fieldnames, ([record.get(name) for name in fieldnames] for record in records))
