"""Deterministic file output: CSV, JSON, and run manifests.

Every writer is atomic (write to a sibling temp file, then rename) and
byte-stable: floats are serialized with ``repr`` (shortest round-trip,
``.`` decimal separator), line endings are LF, JSON keys are sorted, and
nothing time- or host-dependent is ever written.
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Any, Iterable

import numpy as np

from . import __version__

__all__ = ["format_number", "write_csv", "write_json", "write_manifest"]


def format_number(v) -> str:
    """Shortest exact decimal form of a number (ints stay ints)."""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _atomic_write_text(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, newline="\n")
    os.replace(tmp, path)


def write_csv(path: str | Path, header: list[str], rows: Iterable[Iterable]) -> Path:
    """Write a delimited table: comma separator, header row, LF endings."""
    path = Path(path)
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_number(v) for v in row))
    _atomic_write_text(path, "\n".join(lines) + "\n")
    return path


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, Path):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def write_json(path: str | Path, obj: Any) -> Path:
    path = Path(path)
    _atomic_write_text(path, json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")
    return path


def write_manifest(outdir: str | Path, command: str, config: dict[str, Any],
                   outputs: list[str]) -> Path:
    """Record what a run produced and from which configuration.

    The manifest plus the package version is enough to reproduce every
    listed file byte for byte (no timestamps on purpose).
    """
    outdir = Path(outdir)
    return write_json(outdir / "manifest.json", {
        "command": command,
        "config": config,
        "outputs": sorted(outputs),
        "version": __version__,
    })
