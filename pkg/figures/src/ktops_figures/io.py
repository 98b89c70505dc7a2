"""CSV loading with schema validation against the documented headers."""

from __future__ import annotations

from pathlib import Path

import numpy as np

__all__ = ["SchemaError", "SCHEMAS", "load_columns", "detect_kind"]

# The documented headers written by the experiment CLI; this is the whole
# interface between the two packages.
SCHEMAS: dict[str, tuple[str, ...]] = {
    "entropy": ("t", "s_vn", "s_lin", "s_lin_scaled"),
    "pt_compare": ("t", "s_lin_exact_scaled", "s_lin_pt_scaled", "rel_dev"),
    "correlation": ("t_ref", "tau", "abs_d", "re_d", "im_d"),
    "husimi": ("theta", "phi", "q"),
    "rates": (
        "k",
        "init_id",
        "theta",
        "phi",
        "gamma_raw",
        "gamma_scaled",
        "quality",
        "lambda_classical",
    ),
}


class SchemaError(ValueError):
    """Input CSV missing, unreadable, or carrying the wrong columns."""


def load_columns(path: str | Path, kind: str) -> dict[str, np.ndarray]:
    """Read one CSV and return its columns, validated against `kind`."""
    expected = SCHEMAS[kind]
    p = Path(path)
    if not p.is_file():
        raise SchemaError(f"{p}: file not found")
    lines = p.read_text().splitlines()
    if not lines:
        raise SchemaError(f"{p}: empty file")
    header = tuple(name.strip() for name in lines[0].split(","))
    if header != expected:
        missing = [c for c in expected if c not in header]
        extra = [c for c in header if c not in expected]
        raise SchemaError(
            f"{p}: expected columns {','.join(expected)}, found {','.join(header)}"
            + (f" (missing: {','.join(missing)})" if missing else "")
            + (f" (unexpected: {','.join(extra)})" if extra else "")
        )
    rows = []
    for lineno, line in enumerate(lines[1:], 2):
        parts = line.split(",")
        if len(parts) != len(expected):
            raise SchemaError(
                f"{p}:{lineno}: expected {len(expected)} fields, found {len(parts)}"
            )
        try:
            rows.append([float(x) for x in parts])
        except ValueError:
            raise SchemaError(f"{p}:{lineno}: non-numeric field in {line!r}") from None
    if not rows:
        raise SchemaError(f"{p}: no data rows")
    data = np.array(rows)
    return {name: data[:, i] for i, name in enumerate(expected)}


def detect_kind(path: str | Path, candidates: tuple[str, ...]) -> str:
    """Pick which of `candidates` matches the file's header."""
    p = Path(path)
    if not p.is_file():
        raise SchemaError(f"{p}: file not found")
    with p.open() as fh:
        header = tuple(name.strip() for name in fh.readline().rstrip("\n").split(","))
    for kind in candidates:
        if header == SCHEMAS[kind]:
            return kind
    options = " or ".join(",".join(SCHEMAS[k]) for k in candidates)
    raise SchemaError(f"{p}: header {','.join(header)} matches none of: {options}")
