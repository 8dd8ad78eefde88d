"""JSON file formats.

Two input schemas share one extension and are told apart by their keys:

fusion data::

    {"conductor": n,
     "objects": [{"name": str, "simples": int | [str],
                  "fusion": [k matrices, k x k],   # fusion[i][j][l] = mult of X_l in X_i X_j
                  "dims": [value, ...]}],
     "bimodules": [{"from": name, "to": name, "simples": int | [str],
                    "left_action": [k_from matrices, s x s],   # [x][m][m'] = mult of m' in x.m
                    "right_action": [s matrices, k_to x s]}]}  # [m][y][m'] = mult of m' in m.y

``from`` acts on the left, ``to`` on the right.

direct problem::

    {"conductor": n, "M": [[...]], "v": [[value, ...], ...], "D": value,
     "layout": [int, ...], "names": [str, ...]}   # layout/names optional

Cyclotomic values serialize as ``{"conductor": n, "coeffs": ["p/q", ...]}``.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np

from .cyclotomic import CycloNumber
from .fusion_data import BimoduleBlock, DecompositionProblem, FusionRing, TwoCategoryData

__all__ = [
    "FormatError",
    "read_json",
    "parse_input",
    "parse_fusion_data",
    "parse_problem",
    "problem_to_json",
    "matrix_to_json",
    "format_grid",
    "load_input",
]


class FormatError(ValueError):
    """Malformed input; ``path`` locates the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def read_json(path: str | Path) -> Any:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FormatError(str(path), f"cannot read file ({exc.strerror})") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}:{exc.lineno}:{exc.colno}", exc.msg) from exc


def _require(obj: dict, key: str, path: str):
    if not isinstance(obj, dict):
        raise FormatError(path, "expected an object")
    if key not in obj:
        raise FormatError(f"{path}.{key}", "missing field")
    return obj[key]


def _int_array(data, shape: tuple[int, ...], path: str) -> np.ndarray:
    try:
        arr = np.array(data, dtype=object)
        if arr.shape != shape:
            raise FormatError(path, f"expected shape {shape}, got {arr.shape}")
        out = np.array([int(x) for x in arr.ravel()], dtype=np.int64).reshape(shape)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(path, f"expected an integer array ({exc})") from exc
    return out


def _value(data, conductor: int, path: str) -> CycloNumber:
    try:
        return CycloNumber.from_json(data, conductor)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise FormatError(path, str(exc)) from exc


def _names(value, default_prefix: str, path: str) -> tuple[int, tuple[str, ...]]:
    if isinstance(value, int):
        return value, tuple(f"{default_prefix}[{i}]" for i in range(value))
    if isinstance(value, list) and all(isinstance(s, str) for s in value):
        return len(value), tuple(value)
    raise FormatError(path, "expected a count or a list of names")


def parse_fusion_data(doc: dict, sort_by_dimension: bool = False) -> TwoCategoryData:
    """Build :class:`TwoCategoryData`; simples keep input order unless sorting is asked for."""
    conductor = _require(doc, "conductor", "$")
    if not isinstance(conductor, int) or conductor < 1:
        raise FormatError("$.conductor", "expected a positive integer")
    rings = []
    for a, obj in enumerate(_require(doc, "objects", "$")):
        p = f"$.objects[{a}]"
        name = _require(obj, "name", p)
        k, simple_names = _names(_require(obj, "simples", p), name, f"{p}.simples")
        N = _int_array(_require(obj, "fusion", p), (k, k, k), f"{p}.fusion")
        dims_raw = _require(obj, "dims", p)
        if len(dims_raw) != k:
            raise FormatError(f"{p}.dims", f"expected {k} values, got {len(dims_raw)}")
        dims = tuple(_value(d, conductor, f"{p}.dims[{i}]") for i, d in enumerate(dims_raw))
        rings.append(FusionRing(name, N, dims, simple_names, int(obj.get("unit", 0))))
    by_name = {r.name: r for r in rings}
    blocks = []
    for b, obj in enumerate(doc.get("bimodules", [])):
        p = f"$.bimodules[{b}]"
        left, right = _require(obj, "from", p), _require(obj, "to", p)
        for key, nm in (("from", left), ("to", right)):
            if nm not in by_name:
                raise FormatError(f"{p}.{key}", f"unknown object {nm!r}")
        s, _ = _names(_require(obj, "simples", p), f"{left}|{right}", f"{p}.simples")
        L = _int_array(_require(obj, "left_action", p), (by_name[left].rank, s, s), f"{p}.left_action")
        Rt = _int_array(_require(obj, "right_action", p), (s, by_name[right].rank, s), f"{p}.right_action")
        blocks.append(BimoduleBlock(left, right, L, Rt.transpose(1, 0, 2).copy()))
    data = TwoCategoryData(conductor, tuple(rings), tuple(blocks))
    if sort_by_dimension:
        data = sort_simples_by_dimension(data)
    return data


def sort_simples_by_dimension(data: TwoCategoryData) -> TwoCategoryData:
    """Reorder every ring's simples by numeric dimension (stable on ties)."""
    orders = {}
    rings = []
    for r in data.objects:
        order = sorted(range(r.rank), key=lambda i: (complex(r.dims[i]).real, i))
        orders[r.name] = order
        rings.append(r.reordered(order))
    blocks = [
        BimoduleBlock(b.left_object, b.right_object, b.left[orders[b.left_object]], b.right[orders[b.right_object]])
        for b in data.blocks
    ]
    return TwoCategoryData(data.conductor, tuple(rings), tuple(blocks))


def parse_problem(doc: dict) -> DecompositionProblem:
    conductor = _require(doc, "conductor", "$")
    if not isinstance(conductor, int) or conductor < 1:
        raise FormatError("$.conductor", "expected a positive integer")
    M_raw = _require(doc, "M", "$")
    n = len(M_raw)
    M = _int_array(M_raw, (n, n), "$.M")
    vs = []
    for i, v in enumerate(_require(doc, "v", "$")):
        if len(v) != n:
            raise FormatError(f"$.v[{i}]", f"expected {n} values, got {len(v)}")
        vs.append(tuple(_value(x, conductor, f"$.v[{i}][{j}]") for j, x in enumerate(v)))
    D = _value(_require(doc, "D", "$"), conductor, "$.D")
    try:
        return DecompositionProblem(
            M=M,
            vs=tuple(vs),
            D=D,
            conductor=conductor,
            layout=tuple(doc.get("layout", ())),
            names=tuple(doc.get("names", ())),
        )
    except ValueError as exc:
        raise FormatError("$", str(exc)) from exc


def parse_input(doc: dict, sort_by_dimension: bool = False) -> TwoCategoryData | DecompositionProblem:
    if not isinstance(doc, dict):
        raise FormatError("$", "expected a JSON object")
    if "objects" in doc:
        return parse_fusion_data(doc, sort_by_dimension)
    if "M" in doc:
        return parse_problem(doc)
    raise FormatError("$", "neither fusion data ('objects') nor a problem ('M')")


def load_input(path: str | Path, sort_by_dimension: bool = False):
    return parse_input(read_json(path), sort_by_dimension)


def _scalar(x) -> int | str:
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else str(x)
    return int(x)


def matrix_to_json(M) -> list[list]:
    return [[_scalar(x) for x in row] for row in (M.tolist() if isinstance(M, np.ndarray) else M)]


def problem_to_json(p: DecompositionProblem) -> dict:
    return {
        "conductor": p.conductor,
        "M": matrix_to_json(p.M),
        "v": [[x.to_json() for x in v] for v in p.vs],
        "D": p.D.to_json(),
        "layout": list(p.layout),
        "names": list(p.names),
    }


def format_grid(M) -> str:
    """Aligned, human-readable rendering of an integer or rational matrix."""
    rows = [[str(_scalar(x)) for x in row] for row in (M.tolist() if isinstance(M, np.ndarray) else M)]
    if not rows or not rows[0]:
        return "[]"
    width = max(len(s) for r in rows for s in r)
    return "\n".join(" ".join(s.rjust(width) for s in r) for r in rows)
