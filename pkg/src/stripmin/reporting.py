"""Artifact writers: deterministic CSV/JSON plus the run manifest.

Determinism contract: the same config and seed must produce byte-identical
CSV files, so floats are always formatted with 17 significant digits (enough
to round-trip an IEEE double), line endings are LF, encoding is UTF-8, and
row order is whatever the producing module computed — never a hash order.
The manifest ties every artifact to the sha256 of the canonical config JSON
so a stray CSV can always be traced back to the exact run that made it.
"""

from __future__ import annotations

import csv
import hashlib
import json
import platform
import sys
import time
from pathlib import Path

from .config import RunConfig, to_file_dict

__all__ = [
    "config_hash",
    "format_value",
    "write_csv",
    "write_json",
    "write_manifest",
]

_FLOAT_DIGITS = 17


def format_value(value) -> str:
    """Fixed-width-significand text for CSV cells: floats at 17 significant
    digits, everything else via str()."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.{_FLOAT_DIGITS}g}"
    return str(value)


def write_csv(path: str | Path, header: list[str], rows) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as sink:
        writer = csv.writer(sink, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(cell) for cell in row])
    return path


def write_json(path: str | Path, payload) -> Path:
    path = Path(path)
    text = json.dumps(payload, indent=2, sort_keys=True, allow_nan=True)
    path.write_text(text + "\n", encoding="utf-8")
    return path


def config_hash(config: RunConfig) -> str:
    canonical = json.dumps(to_file_dict(config), sort_keys=True,
                           separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def write_manifest(out_dir: str | Path, config: RunConfig,
                   subcommand: str, artifacts: list[str],
                   walltime_s: float) -> Path:
    """manifest.json: which command, which config (hash + inline copy),
    which artifacts, how long, on what stack."""
    import numpy
    import scipy

    from . import __version__

    payload = {
        "subcommand": subcommand,
        "config_hash": config_hash(config),
        "config": to_file_dict(config),
        "artifacts": sorted(artifacts),
        "walltime_s": walltime_s,
        "versions": {
            "package": __version__,
            "python": platform.python_version(),
            "numpy": numpy.__version__,
            "scipy": scipy.__version__,
        },
        "argv": sys.argv[1:],
        "finished_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }
    return write_json(Path(out_dir) / "manifest.json", payload)
