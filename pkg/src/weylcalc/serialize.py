"""Bit-stable JSON/CSV serialization and run manifests.

All floats are rendered with 17 significant digits and all JSON keys are
sorted, so identical runs produce byte-identical artifacts.  Every report
embeds (JSON) or accompanies (CSV) its :class:`RunManifest`.
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .errors import IoFailure, MalformedSpec
from .operators import CompositeOperator, ConvolutionOperator, WeylOperator
from .series import TaylorSeries

TIMESTAMP_ENV = "WEYLCALC_TIMESTAMP"
WORKDIR_ENV = "WEYLCALC_WORKDIR"


# ---------------------------------------------------------------------------
# stable JSON


def _fmt_float(x: float) -> str:
    if x != x or x in (float("inf"), float("-inf")):
        raise ValueError(f"non-finite value {x} cannot be serialized")
    return f"{x:.17g}"


def stable_json_dumps(obj, indent: int = 0) -> str:
    """Deterministic JSON text: sorted keys, fixed float formatting."""
    pad = " " * indent
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        import json

        return json.dumps(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return f"[{_fmt_float(obj.real)}, {_fmt_float(obj.imag)}]"
    if isinstance(obj, (list, tuple, np.ndarray)):
        items = [stable_json_dumps(v, indent) for v in obj]
        return "[" + ", ".join(items) + "]"
    if isinstance(obj, dict):
        items = [
            f'"{k}": {stable_json_dumps(obj[k], indent)}'
            for k in sorted(obj, key=str)
        ]
        return "{" + ", ".join(items) + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


# ---------------------------------------------------------------------------
# series / operators


def complex_pair(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _pair_to_complex(pair, what: str) -> complex:
    if (
        not isinstance(pair, (list, tuple))
        or len(pair) != 2
        or not all(isinstance(v, (int, float)) for v in pair)
    ):
        raise MalformedSpec(f"{what}: expected [re, im] pair, got {pair!r}")
    return complex(pair[0], pair[1])


def series_to_dict(s: TaylorSeries) -> dict:
    return {
        "label": s.label,
        "coeffs": [complex_pair(c) for c in s.coeffs],
        "valid_order": int(s.valid_order),
    }


def series_from_dict(d: dict) -> TaylorSeries:
    if not isinstance(d, dict) or "coeffs" not in d:
        raise MalformedSpec("series: expected an object with a 'coeffs' field")
    coeffs = [_pair_to_complex(p, "series.coeffs") for p in d["coeffs"]]
    if not coeffs:
        raise MalformedSpec("series.coeffs must be non-empty")
    valid = d.get("valid_order", len(coeffs))
    if not isinstance(valid, int) or not (1 <= valid <= len(coeffs)):
        raise MalformedSpec(f"series.valid_order out of range: {valid!r}")
    return TaylorSeries(
        np.array(coeffs, dtype=np.complex128),
        valid_order=valid,
        label=str(d.get("label", "")),
    )


def operator_to_dict(op) -> dict:
    if isinstance(op, ConvolutionOperator):
        return {"d": [complex_pair(c) for c in op.d], "a": [0.0, 0.0]}
    if isinstance(op, WeylOperator):
        return {
            "d": [complex_pair(c) for c in op.m.d],
            "a": complex_pair(op.a),
        }
    if isinstance(op, CompositeOperator):
        out = operator_to_dict(op.base)
        out["L"] = [complex_pair(c) for c in op.l]
        return out
    raise TypeError(f"cannot serialize operator {type(op).__name__}")


def parse_operator_spec(doc: dict):
    """Validated WeylOperator or CompositeOperator from its JSON form."""
    if not isinstance(doc, dict) or "d" not in doc:
        raise MalformedSpec("operator: expected an object with a 'd' field")
    if not isinstance(doc["d"], list) or not doc["d"]:
        raise MalformedSpec("operator.d must be a non-empty list of [re, im]")
    d = [_pair_to_complex(p, "operator.d") for p in doc["d"]]
    a = (
        _pair_to_complex(doc["a"], "operator.a")
        if "a" in doc
        else complex(0.0)
    )
    m = ConvolutionOperator(np.array(d, dtype=np.complex128))  # ZeroOperator here
    t = WeylOperator(m, a)
    if "L" in doc:
        if not isinstance(doc["L"], list) or not doc["L"]:
            raise MalformedSpec("operator.L must be a non-empty list of [re, im]")
        l = [_pair_to_complex(p, "operator.L") for p in doc["L"]]
        return CompositeOperator(t, np.array(l, dtype=np.complex128))
    return t


# ---------------------------------------------------------------------------
# CSV


def write_csv(path: Path, header: list, rows) -> None:
    """CSV with .17g float cells, plain ints and strings."""
    def cell(v):
        if isinstance(v, (bool,)):
            return "1" if v else "0"
        if isinstance(v, (int, np.integer)):
            return str(int(v))
        if isinstance(v, (float, np.floating)):
            return _fmt_float(float(v))
        return str(v)

    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(cell(v) for v in row) + "\n")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def matrix_rows(entries: np.ndarray):
    for (r, c), v in np.ndenumerate(entries):
        yield r, c, v.real, v.imag


def grid_rows(theta: np.ndarray, values: np.ndarray):
    for th, v in zip(theta, values):
        yield float(th), v.real, v.imag, abs(v)


# ---------------------------------------------------------------------------
# manifests


@dataclass(frozen=True)
class RunManifest:
    command: str
    parameters: dict
    tool_version: str = __version__
    timestamp: str = ""
    input_hashes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "parameters": self.parameters,
            "tool_version": self.tool_version,
            "timestamp": self.timestamp,
            "input_hashes": list(self.input_hashes),
        }


def _default_timestamp() -> str:
    env = os.environ.get(TIMESTAMP_ENV)
    if env:
        return env
    return datetime.now(timezone.utc).isoformat()


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def build_manifest(
    command: str, parameters: dict, inputs=(), timestamp: str | None = None
) -> RunManifest:
    hashes = [f"sha256:{file_digest(p)}" for p in inputs]
    return RunManifest(
        command=command,
        parameters=parameters,
        timestamp=timestamp if timestamp is not None else _default_timestamp(),
        input_hashes=hashes,
    )


def write_report(path: Path, payload: dict, manifest: RunManifest) -> None:
    """JSON artifact with the manifest embedded."""
    doc = dict(payload)
    doc["manifest"] = manifest.to_dict()
    try:
        Path(path).write_text(stable_json_dumps(doc) + "\n", encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def write_manifest_sidecar(path: Path, manifest: RunManifest) -> None:
    """Companion manifest for CSV artifacts."""
    side = Path(str(path) + ".manifest.json")
    try:
        side.write_text(
            stable_json_dumps(manifest.to_dict()) + "\n", encoding="utf-8"
        )
    except OSError as exc:
        raise IoFailure(f"cannot write {side}: {exc}") from exc
