"""Artifact persistence: atomic CSV/JSON writers, config files, binary dumps.

All writers go through write-temp-then-rename on the same filesystem, so an
interrupted run never leaves a truncated file at the target path.  Floats
are printed with 17 significant digits (round-trip exact for float64), CSV
uses comma separators and LF line endings, JSON keeps insertion key order.
"""

from __future__ import annotations

import json
import math
import os
import struct
import tempfile
from pathlib import Path

import numpy as np
import yaml

from .params import ModelParams


def _format_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v)) if math.isfinite(v) else str(float(v))
    return str(v)


def _atomic_write(path, data: bytes):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_format_value(v) for v in row))
    _atomic_write(path, ("\n".join(lines) + "\n").encode("utf-8"))


def _jsonify(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonify(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else str(f)
    return obj


def write_json(path, payload: dict) -> None:
    text = json.dumps(_jsonify(payload), indent=2, sort_keys=False)
    _atomic_write(path, (text + "\n").encode("utf-8"))


def write_vector_binary(path, vector: np.ndarray) -> None:
    """Little-endian float64 array preceded by an 8-byte length header."""
    vec = np.ascontiguousarray(vector, dtype="<f8")
    _atomic_write(path, struct.pack("<q", vec.size) + vec.tobytes())


def read_vector_binary(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    (size,) = struct.unpack("<q", raw[:8])
    vec = np.frombuffer(raw[8:], dtype="<f8")
    if vec.size != size:
        raise ValueError(f"binary vector header says {size}, found {vec.size}")
    return vec.copy()


def load_config(path) -> dict:
    """Parse the YAML config; returns the raw section dict.

    Top-level sections: `units` (default "sGamma"), `model`, `vmc`,
    `sweep`.  Unknown sections are a hard error, as are unknown keys
    inside `model` (checked by ModelParams.from_dict).
    """
    with open(path, "r", encoding="utf-8") as fh:
        data = yaml.safe_load(fh)
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ValueError(f"config root must be a mapping, got {type(data).__name__}")
    known = {"units", "model", "vmc", "sweep"}
    unknown = set(data) - known
    if unknown:
        raise KeyError(f"unknown config sections: {sorted(unknown)}")
    data.setdefault("units", "sGamma")
    return data


def params_from_config(config: dict) -> ModelParams:
    model = config.get("model")
    if model is None:
        raise KeyError("config has no `model` section")
    return ModelParams.from_dict(model, units=config.get("units", "sGamma"))


def save_config(path, params: ModelParams, units: str = "sGamma",
                extra_sections: dict | None = None) -> None:
    doc = {"units": units, "model": params.to_dict(units=units)}
    if extra_sections:
        doc.update(extra_sections)
    _atomic_write(path, yaml.safe_dump(doc, sort_keys=False).encode("utf-8"))
