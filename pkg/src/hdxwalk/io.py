"""JSON formats for complexes, cochains and face sets, and canonical dumps.

Reports are written with sorted keys and Python's shortest round-trip float
repr (at most 17 significant digits), so identical inputs give identical
bytes. Loaders raise :class:`FormatError` naming the offending line (for
syntax errors) or field path (for schema errors).
"""

from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .cochains import Cochain
from .complex import SimplicialComplex, WeightFunction, build_from_top_faces, simplex
from .errors import ComplexError, DimensionMismatchError, FormatError
from .mixing import FaceSet

__all__ = [
    "canonical",
    "dumps",
    "digest",
    "read_json",
    "write_json",
    "complex_to_json",
    "complex_from_json",
    "load_complex",
    "cochain_to_json",
    "cochain_from_json",
    "faceset_to_json",
    "faceset_from_json",
]


def canonical(obj: Any) -> Any:
    """Plain JSON types only: tuples to lists, numpy scalars unwrapped, NaN/inf to None."""
    if isinstance(obj, dict):
        return {str(k): canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [canonical(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [canonical(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(canonical(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def digest(obj: Any) -> str:
    """sha256 of the compact canonical serialization."""
    text = json.dumps(canonical(obj), sort_keys=True, separators=(",", ":"), allow_nan=False)
    return "sha256:" + hashlib.sha256(text.encode()).hexdigest()


def read_json(path: str | Path) -> Any:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise FormatError(f"{path}: cannot read ({exc.strerror})") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def write_json(path: str | Path, obj: Any) -> None:
    Path(path).write_text(dumps(obj))


# -- field helpers -------------------------------------------------------------

def _field(doc: Any, key: str, where: str, kind: type | tuple[type, ...], default: Any = ...) -> Any:
    if not isinstance(doc, dict):
        raise FormatError(f"field {where or '<root>'}: expected an object")
    if key not in doc:
        if default is not ...:
            return default
        raise FormatError(f"field {where + '.' if where else ''}{key}: missing")
    val = doc[key]
    bad_bool = isinstance(val, bool) and bool not in (kind if isinstance(kind, tuple) else (kind,))
    if bad_bool or not isinstance(val, kind):
        raise FormatError(f"field {where + '.' if where else ''}{key}: wrong type {type(val).__name__}")
    return val


def _vertices(val: Any, where: str) -> tuple[int, ...]:
    if not isinstance(val, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in val):
        raise FormatError(f"field {where}: expected a list of integers")
    try:
        return simplex(val)
    except ComplexError as exc:
        raise FormatError(f"field {where}: {exc}") from exc


def _number(val: Any, where: str) -> float:
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise FormatError(f"field {where}: expected a number")
    return float(val)


# -- complexes -----------------------------------------------------------------

def complex_to_json(m: WeightFunction, metadata: dict | None = None) -> dict:
    X = m.complex
    doc: dict[str, Any] = {
        "n": X.n,
        "top_faces": [{"vertices": list(t), "weight": float(m[t])} for t in X.top_faces],
    }
    if metadata is not None:
        doc["metadata"] = metadata
    return doc


def complex_from_json(doc: Any) -> tuple[SimplicialComplex, WeightFunction]:
    """Build (X, m) from ``{"n", "top_faces": [{"vertices", "weight"?}]}``.

    Lower weights always come from the coface-sum recursion. Domain errors
    (non-positive weights, duplicates, ragged faces) propagate with the
    field path prepended.
    """
    n = _field(doc, "n", "", int)
    tops = _field(doc, "top_faces", "", list)
    entries = []
    for i, t in enumerate(tops):
        where = f"top_faces[{i}]"
        vs = _vertices(_field(t, "vertices", where, list), where + ".vertices")
        if len(vs) != n + 1:
            raise DimensionMismatchError(
                f"field {where}.vertices: {len(vs)} vertices, expected n+1 = {n + 1}"
            )
        w = _number(_field(t, "weight", where, (int, float), default=1.0), where + ".weight")
        entries.append((vs, w))
    try:
        return build_from_top_faces(entries)
    except ComplexError as exc:
        raise type(exc)(f"field top_faces: {exc}") from exc


def load_complex(path: str | Path) -> tuple[SimplicialComplex, WeightFunction, dict]:
    doc = read_json(path)
    try:
        X, m = complex_from_json(doc)
    except ComplexError as exc:
        raise type(exc)(f"{path}: {exc}") from exc
    return X, m, doc


# -- cochains ------------------------------------------------------------------

def cochain_to_json(phi: Cochain) -> dict:
    faces = phi.complex.faces(phi.k)
    return {
        "k": phi.k,
        "entries": [{"vertices": list(f), "value": float(v)} for f, v in zip(faces, phi.values)],
    }


def cochain_from_json(doc: Any, m: WeightFunction) -> Cochain:
    """``{"k", "entries": [{"vertices", "value"}]}``; unlisted faces are 0."""
    k = _field(doc, "k", "", int)
    X = m.complex
    if not 0 <= k <= X.n:
        raise FormatError(f"field k: {k} outside 0..{X.n}")
    vals = np.zeros(X.size(k))
    seen = set()
    for i, e in enumerate(_field(doc, "entries", "", list)):
        where = f"entries[{i}]"
        f = _vertices(_field(e, "vertices", where, list), where + ".vertices")
        if len(f) != k + 1:
            raise FormatError(f"field {where}.vertices: not a {k}-face")
        if f not in X:
            raise FormatError(f"field {where}.vertices: {list(f)} is not a face of the complex")
        if f in seen:
            raise FormatError(f"field {where}.vertices: {list(f)} listed twice")
        seen.add(f)
        v = _number(_field(e, "value", where, (int, float)), where + ".value")
        if not math.isfinite(v):
            raise FormatError(f"field {where}.value: not finite")
        vals[X.index(f)] = v
    return Cochain(m, k, vals)


# -- face sets -----------------------------------------------------------------

def faceset_to_json(A: FaceSet) -> dict:
    return {"k": A.k, "faces": [list(f) for f in A.faces]}


def faceset_from_json(doc: Any, m: WeightFunction) -> FaceSet:
    """``{"k", "faces": [[v, ...], ...]}``."""
    k = _field(doc, "k", "", int)
    raw = _field(doc, "faces", "", list)
    faces = [_vertices(f, f"faces[{i}]") for i, f in enumerate(raw)]
    try:
        return FaceSet(m, k, tuple(faces))
    except ComplexError as exc:
        raise type(exc)(f"field faces: {exc}") from exc
