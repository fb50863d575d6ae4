"""Bit-exact output formats.

Arrays go to raw little-endian float64 in row-major order with a JSON
sidecar holding shape, axis order, grid definitions, and a content
checksum.  Tabular outputs are CSV with a header row and 17 significant
decimal digits, which round-trips float64 exactly.  All rendering is
locale-independent.
"""

from __future__ import annotations

import hashlib
import json
import os
from datetime import datetime, timezone

import numpy as np


def fmt(value) -> str:
    """Render one value deterministically for CSV output."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    return format(float(value), ".17g")


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def write_array(directory: str, name: str, values: np.ndarray, axis_names, grids) -> list:
    """Write name.bin plus a name.json sidecar; returns the paths written."""
    payload = np.ascontiguousarray(values, dtype="<f8").tobytes()
    bin_path = os.path.join(directory, name + ".bin")
    with open(bin_path, "wb") as fh:
        fh.write(payload)
    sidecar = {
        "dtype": "float64",
        "byte_order": "little",
        "order": "C",
        "shape": list(values.shape),
        "axis_order": list(axis_names),
        "grids": {
            str(axis): {"n": g.n, "half_width": g.half_width, "step": g.step}
            for axis, g in zip(axis_names, grids)
        },
        "sha256": sha256_hex(payload),
    }
    json_path = os.path.join(directory, name + ".json")
    _write_json(json_path, sidecar)
    return [bin_path, json_path]


def read_array(directory: str, name: str):
    """Load an array written by :func:`write_array`; verifies the checksum."""
    with open(os.path.join(directory, name + ".json"), "r", encoding="utf-8") as fh:
        meta = json.load(fh)
    with open(os.path.join(directory, name + ".bin"), "rb") as fh:
        payload = fh.read()
    if sha256_hex(payload) != meta["sha256"]:
        raise ValueError(f"checksum mismatch for {name}.bin")
    values = np.frombuffer(payload, dtype="<f8").reshape(meta["shape"])
    return values, meta


def write_csv(path: str, header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def _write_json(path: str, doc: dict) -> str:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def write_manifest(
    directory: str,
    command: str,
    config_dict: dict,
    status: str,
    outputs,
    tool: str,
    version: str,
    error: str | None = None,
) -> str:
    """Manifest echoing the resolved config; the timestamp is the only
    field excluded from determinism comparisons."""
    doc = {
        "tool": tool,
        "version": version,
        "command": command,
        "status": status,
        "config": config_dict,
        "outputs": sorted(os.path.basename(p) for p in outputs),
        "created_at": datetime.now(timezone.utc).isoformat(),
    }
    if error is not None:
        doc["error"] = error
    return _write_json(os.path.join(directory, "manifest.json"), doc)


def write_resolved_config(directory: str, config_dict: dict) -> str:
    """Standalone copy of the resolved config; feeding it back to the CLI
    reproduces the run exactly."""
    return _write_json(os.path.join(directory, "resolved_config.json"), config_dict)
