"""JSON documents for hypercube objects and filtrations.

Node labels are sorted integer arrays rendered as strings ("[1,2]"); an
arrow key "A|k" names the arrow pair between node A and A minus {k}, so
k must be a member of A.  Complex numbers are two-element [re, im]
arrays, matrices nested row-major arrays.  Parsing is strict about every
value it is handed and reports the JSON path of the first offence;
omitted nodes default to dimension zero and omitted matrices to zero
matrices of the right shape.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .objects import Filtration, HypercubeObject
from .predmod import PreDModule
from .strata import PolydiskContext, mask_of, subset_of
from .verdier import VerdierObject

_KINDS = {
    "pre-d-module": (PreDModule, "theta", "t", "s"),
    "verdier-object": (VerdierObject, "mono", "C", "V"),
}


class DocumentError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def node_label(subset: tuple[int, ...]) -> str:
    return "[" + ",".join(str(k) for k in subset) + "]"


def parse_node_label(label: str, r: int, path: str) -> int:
    text = label.strip()
    if not (text.startswith("[") and text.endswith("]")):
        raise DocumentError(path, f"node label must look like [1,2], got {label!r}")
    inner = text[1:-1].strip()
    if not inner:
        return 0
    try:
        parts = [int(p) for p in inner.split(",")]
    except ValueError:
        raise DocumentError(path, f"non-integer entry in node label {label!r}") from None
    if parts != sorted(set(parts)):
        raise DocumentError(path, f"node label must be a sorted set, got {label!r}")
    if parts and (parts[0] < 1 or parts[-1] > r):
        raise DocumentError(path, f"node label {label!r} out of range 1..{r}")
    return mask_of(parts)


def _complex_to_json(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def matrix_to_json(m: np.ndarray) -> list:
    return [[_complex_to_json(m[i, j]) for j in range(m.shape[1])]
            for i in range(m.shape[0])]


def matrix_from_json(data, rows: int, cols: int, path: str) -> np.ndarray:
    if not isinstance(data, list):
        raise DocumentError(path, "matrix must be a list of rows")
    if len(data) != rows:
        raise DocumentError(path, f"expected {rows} rows, got {len(data)}")
    out = np.zeros((rows, cols), dtype=complex)
    for i, row in enumerate(data):
        if not isinstance(row, list) or len(row) != cols:
            raise DocumentError(f"{path}[{i}]", f"expected {cols} entries")
        for j, entry in enumerate(row):
            if (not isinstance(entry, list) or len(entry) != 2
                    or not all(isinstance(x, (int, float)) for x in entry)):
                raise DocumentError(f"{path}[{i}][{j}]",
                                    "complex entries are [re, im] number pairs")
            re, im = float(entry[0]), float(entry[1])
            if not (math.isfinite(re) and math.isfinite(im)):
                raise DocumentError(f"{path}[{i}][{j}]", "entries must be finite")
            out[i, j] = complex(re, im)
    return out


def serialize(obj: HypercubeObject) -> dict:
    """Canonical JSON document of an object."""
    for kind, (cls, loop_key, down_key, up_key) in _KINDS.items():
        if type(obj) is cls:
            break
    else:
        raise ValueError(f"cannot serialize object of type {type(obj).__name__}")
    nodes = {}
    for a in obj.node_order:
        label = node_label(subset_of(a))
        nodes[label] = {
            "dim": obj.dims[a],
            loop_key: {str(k): matrix_to_json(obj.loops[a][k])
                       for k in obj.ctx.directions},
        }
    down = {}
    up = {}
    for (a, k) in obj.arrow_order:
        key = f"{node_label(subset_of(a))}|{k}"
        down[key] = matrix_to_json(obj.down[(a, k)])
        up[key] = matrix_to_json(obj.up[(a, k)])
    doc = {
        "kind": kind,
        "context": {"d": obj.ctx.d, "r": obj.ctx.r},
        "nodes": nodes,
        down_key: down,
        up_key: up,
    }
    if obj.metadata:
        doc["metadata"] = obj.metadata
    return doc


def parse(doc) -> HypercubeObject:
    """Parse a document back into an object, with path-precise errors."""
    if not isinstance(doc, dict):
        raise DocumentError("$", "document must be a JSON object")
    kind = doc.get("kind")
    if kind not in _KINDS:
        raise DocumentError("kind", f"unknown kind {kind!r}")
    cls, loop_key, down_key, up_key = _KINDS[kind]
    ctx_doc = doc.get("context")
    if not isinstance(ctx_doc, dict):
        raise DocumentError("context", "missing context {d, r}")
    try:
        ctx = PolydiskContext(int(ctx_doc.get("d", -1)), int(ctx_doc.get("r", -1)))
    except (TypeError, ValueError) as exc:
        raise DocumentError("context", str(exc)) from None
    nodes_doc = doc.get("nodes", {})
    if not isinstance(nodes_doc, dict):
        raise DocumentError("nodes", "must be an object keyed by node labels")
    dims = {}
    loops = {}
    for label, entry in nodes_doc.items():
        path = f"nodes.{label}"
        mask = parse_node_label(label, ctx.r, path)
        if not isinstance(entry, dict) or "dim" not in entry:
            raise DocumentError(path, "node entries need a dim field")
        try:
            n = int(entry["dim"])
        except (TypeError, ValueError):
            raise DocumentError(f"{path}.dim", "dim must be an integer") from None
        if n < 0:
            raise DocumentError(f"{path}.dim", "dim must be >= 0")
        dims[mask] = n
        loop_doc = entry.get(loop_key, {})
        if not isinstance(loop_doc, dict):
            raise DocumentError(f"{path}.{loop_key}", "must map directions to matrices")
        loops[mask] = {}
        for k_str, mat in loop_doc.items():
            kpath = f"{path}.{loop_key}.{k_str}"
            try:
                k = int(k_str)
            except ValueError:
                raise DocumentError(kpath, "direction keys are integers") from None
            if not 1 <= k <= ctx.r:
                raise DocumentError(kpath, f"direction {k} out of range 1..{ctx.r}")
            loops[mask][k] = matrix_from_json(mat, n, n, kpath)

    def parse_arrows(section_key: str, transpose_dims: bool):
        arrows = {}
        section = doc.get(section_key, {})
        if not isinstance(section, dict):
            raise DocumentError(section_key, "must map arrow keys to matrices")
        for key, mat in section.items():
            path = f"{section_key}.{key}"
            if "|" not in key:
                raise DocumentError(path, "arrow keys look like \"[1,2]|1\"")
            label, _, k_str = key.rpartition("|")
            mask = parse_node_label(label, ctx.r, path)
            try:
                k = int(k_str)
            except ValueError:
                raise DocumentError(path, "direction after | must be an integer") from None
            if not 1 <= k <= ctx.r or not mask & (1 << (k - 1)):
                raise DocumentError(path, f"direction {k} is not a member of {label}")
            n_deep = dims.get(mask, 0)
            n_shallow = dims.get(mask & ~(1 << (k - 1)), 0)
            if transpose_dims:
                rows, cols = n_shallow, n_deep
            else:
                rows, cols = n_deep, n_shallow
            arrows[(mask, k)] = matrix_from_json(mat, rows, cols, path)
        return arrows

    down = parse_arrows(down_key, transpose_dims=False)
    up = parse_arrows(up_key, transpose_dims=True)
    metadata = doc.get("metadata")
    if metadata is not None and not isinstance(metadata, dict):
        raise DocumentError("metadata", "must be an object")
    try:
        return cls(ctx, dims, loops, down, up, metadata=metadata)
    except ValueError as exc:
        raise DocumentError("$", str(exc)) from None


# ---------------------------------------------------------------------------
# filtrations


def serialize_filtration(filt: Filtration, ctx: PolydiskContext) -> dict:
    steps = {}
    for p in filt.grades:
        steps[str(p)] = {
            node_label(subset_of(a)): matrix_to_json(np.asarray(m, dtype=complex))
            for a, m in sorted(filt.steps[p].items())
        }
    return {"kind": "filtration", "grades": list(filt.grades), "steps": steps}


def parse_filtration(doc, obj: HypercubeObject) -> Filtration:
    if not isinstance(doc, dict) or doc.get("kind") != "filtration":
        raise DocumentError("kind", "expected kind \"filtration\"")
    grades = doc.get("grades")
    if (not isinstance(grades, list) or not grades
            or not all(isinstance(g, int) for g in grades)):
        raise DocumentError("grades", "grades must be a nonempty integer list")
    steps_doc = doc.get("steps", {})
    steps = {}
    for p in grades:
        step_doc = steps_doc.get(str(p))
        if step_doc is None:
            raise DocumentError(f"steps.{p}", "missing step for listed grade")
        step = {}
        for label, mat in step_doc.items():
            path = f"steps.{p}.{label}"
            mask = parse_node_label(label, obj.ctx.r, path)
            n = obj.dims.get(mask, 0)
            if not isinstance(mat, list):
                raise DocumentError(path, "expected a matrix")
            cols = len(mat[0]) if mat else 0
            step[mask] = matrix_from_json(mat, n, cols, path)
        steps[p] = step
    return Filtration(list(grades), steps)


def canonical_json(doc) -> str:
    """Deterministic rendering: sorted keys, no NaN, trailing newline."""
    return json.dumps(doc, sort_keys=True, allow_nan=False) + "\n"
