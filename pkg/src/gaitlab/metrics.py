"""Append-only metrics CSV with a schema locked at run start.

Floats are written with repr() so 64-bit values round-trip exactly; each row is
flushed so a crash loses at most one row.
"""

import os


class MetricsError(ValueError):
    pass


def format_cell(v):
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


class MetricsWriter:
    def __init__(self, path, columns):
        self.path = str(path)
        self.columns = tuple(columns)
        if len(set(self.columns)) != len(self.columns):
            raise MetricsError("duplicate column names")
        exists = os.path.exists(self.path) and os.path.getsize(self.path) > 0
        self._fh = open(self.path, "a")
        if not exists:
            self._fh.write(",".join(self.columns) + "\n")
            self._fh.flush()

    def append(self, row):
        """row: mapping column -> value; keys must match the schema exactly."""
        if tuple(row.keys()) != self.columns:
            missing = set(self.columns) - set(row.keys())
            extra = set(row.keys()) - set(self.columns)
            raise MetricsError(
                f"schema drift: missing={sorted(missing)} extra={sorted(extra)} "
                f"(column order must match the header)"
            )
        self._fh.write(",".join(format_cell(row[c]) for c in self.columns) + "\n")
        self._fh.flush()

    def close(self):
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def read_metrics(path):
    """Parse a metrics CSV into {column: list of floats-or-strings}."""
    with open(path) as f:
        lines = f.read().splitlines()
    if not lines:
        raise MetricsError(f"{path}: empty metrics file")
    columns = lines[0].split(",")
    data = {c: [] for c in columns}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != len(columns):
            raise MetricsError(f"{path}: line {lineno}: expected {len(columns)} cells")
        for c, p in zip(columns, parts):
            try:
                data[c].append(float(p))
            except ValueError:
                data[c].append(p)
    return data
