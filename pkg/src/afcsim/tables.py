"""Tab-separated text tables with comment headers."""

from __future__ import annotations

from pathlib import Path

import numpy as np


def write_table(
    path: str | Path,
    columns: dict[str, np.ndarray],
    meta: dict | None = None,
) -> None:
    """Write named columns as tab-separated text with a '#' header."""
    names = list(columns)
    arrays = [np.asarray(columns[n], dtype=float) for n in names]
    lines = ["# afcsim table"]
    for key, val in (meta or {}).items():
        lines.append(f"# {key} = {val!r}")
    lines.append("# columns: " + "\t".join(names))
    data = np.column_stack(arrays)
    np.savetxt(path, data, fmt="%.17g", delimiter="\t",
               header="\n".join(lines), comments="")


def read_table(path: str | Path) -> tuple[dict, dict[str, np.ndarray]]:
    """Read a table written by write_table; returns (meta, columns)."""
    meta: dict[str, str] = {}
    names: list[str] = []
    with open(path) as fh:
        for raw in fh:
            if not raw.startswith("#"):
                break
            body = raw.lstrip("# ").rstrip("\n")
            if body.startswith("columns:"):
                names = body.partition(":")[2].strip().split("\t")
            elif "=" in body:
                key, _, val = body.partition("=")
                meta[key.strip()] = val.strip().strip("'\"")
    data = np.loadtxt(path, comments="#", ndmin=2)
    if not names:
        names = [f"col{i}" for i in range(data.shape[1])]
    return meta, {name: data[:, i] for i, name in enumerate(names)}
