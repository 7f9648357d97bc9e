"""Circuit templates: alternating known local layers and forward query slots.

A template lists its layers in application order: local_0, Q, local_1, ...,
Q, local_k. Locals are stored as explicit (factor_a, factor_b) pairs, so
every layer is a product operator by construction, and the representation
has no way to express an inverted query: the unknown operation only ever
enters forward.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, MatrixFileError, NotUnitary
from .linalg import mat, unitarity_defect


@dataclass
class LocalLayer:
    """Product layer factor_a (x) factor_b."""

    factor_a: np.ndarray
    factor_b: np.ndarray

    def matrix(self) -> np.ndarray:
        return np.kron(self.factor_a, self.factor_b)


class Query:
    """Forward application slot for the unknown operation."""

    def __repr__(self):  # pragma: no cover - debugging aid
        return "Query()"


QUERY = Query()


@dataclass
class CircuitTemplate:
    """Alternating local layers and query slots, in application order.

    Normal form: the sequence starts and ends with a local layer and never
    holds two adjacent locals (they are merged on construction).
    """

    d_a: int
    d_b: int
    layers: list

    def __post_init__(self):
        self.layers = _normalize_layers(self.d_a, self.d_b, self.layers)

    @property
    def query_count(self) -> int:
        return sum(1 for layer in self.layers if isinstance(layer, Query))

    @property
    def dim(self) -> int:
        return self.d_a * self.d_b


def identity_local(d_a: int, d_b: int) -> LocalLayer:
    return LocalLayer(np.eye(d_a, dtype=complex), np.eye(d_b, dtype=complex))


def _merge_locals(first: LocalLayer, second: LocalLayer) -> LocalLayer:
    """Layer applying `first` then `second` (matrix product second @ first)."""
    return LocalLayer(second.factor_a @ first.factor_a,
                      second.factor_b @ first.factor_b)


def _normalize_layers(d_a: int, d_b: int, layers) -> list:
    # Identities are inserted only where the alternation demands one, so a
    # template already in normal form passes through without re-multiplying
    # its locals (serialization round trips stay bit-exact).
    out: list = []
    for layer in layers:
        if isinstance(layer, Query):
            if not out or isinstance(out[-1], Query):
                out.append(identity_local(d_a, d_b))
            out.append(QUERY)
        elif isinstance(layer, LocalLayer):
            fa = np.asarray(layer.factor_a, dtype=complex)
            fb = np.asarray(layer.factor_b, dtype=complex)
            if fa.shape != (d_a, d_a) or fb.shape != (d_b, d_b):
                raise DimensionMismatch(
                    f"local factors {fa.shape}/{fb.shape} do not fit ({d_a}, {d_b})")
            layer = LocalLayer(fa, fb)
            if out and isinstance(out[-1], LocalLayer):
                out[-1] = _merge_locals(out[-1], layer)
            else:
                out.append(layer)
        else:
            raise TypeError(f"unsupported layer type {type(layer)!r}")
    if not out or not isinstance(out[-1], LocalLayer):
        out.append(identity_local(d_a, d_b))
    if not isinstance(out[0], LocalLayer):
        out.insert(0, identity_local(d_a, d_b))
    return out


def check_local_unitarity(t: CircuitTemplate, tol: float = 1e-9) -> None:
    """Raise NotUnitary if any local factor drifted from unitarity."""
    for layer in t.layers:
        if isinstance(layer, LocalLayer):
            for f in (layer.factor_a, layer.factor_b):
                defect = unitarity_defect(f)
                if defect > tol:
                    raise NotUnitary(defect, tol)


def bare_query_template(d_a: int, d_b: int, queries: int = 1) -> CircuitTemplate:
    """Template that just applies the unknown operation `queries` times."""
    layers: list = []
    for _ in range(queries):
        layers.append(QUERY)
    return CircuitTemplate(d_a, d_b, layers)


def evaluate_template(t: CircuitTemplate, X) -> np.ndarray:
    """Matrix of the template with X substituted at every query slot."""
    x = mat(X)
    n = t.dim
    if x.shape != (n, n):
        raise DimensionMismatch(f"expected {n}x{n} query, got {x.shape}")
    M = np.eye(n, dtype=complex)
    for layer in t.layers:
        M = (x if isinstance(layer, Query) else layer.matrix()) @ M
    return M


def compose_templates(outer: CircuitTemplate, inner: CircuitTemplate) -> CircuitTemplate:
    """Substitute `inner` at every query slot of `outer` and flatten.

    Adjacent locals merge by multiplication, so the result is in normal
    form and evaluate(compose(outer, inner), X) equals
    evaluate(outer, evaluate(inner, X)).
    """
    if (outer.d_a, outer.d_b) != (inner.d_a, inner.d_b):
        raise DimensionMismatch(
            f"block dims ({outer.d_a}, {outer.d_b}) != inner dims ({inner.d_a}, {inner.d_b})")
    layers: list = []
    for layer in outer.layers:
        if isinstance(layer, Query):
            layers.extend(inner.layers)
        else:
            layers.append(layer)
    return CircuitTemplate(outer.d_a, outer.d_b, layers)


def append_query(t: CircuitTemplate, local: LocalLayer | None = None) -> CircuitTemplate:
    """Template applying t, then the unknown once, then an optional local."""
    layers = list(t.layers) + [QUERY]
    if local is not None:
        layers.append(local)
    return CircuitTemplate(t.d_a, t.d_b, layers)


def sequential_template(d_a: int, d_b: int, locals_between: list[LocalLayer]) -> CircuitTemplate:
    """Q, local_1, Q, ..., local_N, Q: the interleaved sequential shape.

    locals_between[0] is applied right after the first query.
    """
    layers: list = [QUERY]
    for layer in locals_between:
        layers.append(layer)
        layers.append(QUERY)
    return CircuitTemplate(d_a, d_b, layers)


# --- serialization ---------------------------------------------------------

def _matrix_to_lists(M: np.ndarray):
    return [[[float(z.real), float(z.imag)] for z in row] for row in M]


def _matrix_from_lists(rows, d: int, what: str) -> np.ndarray:
    arr = np.asarray(rows, dtype=float)
    if arr.shape != (d, d, 2):
        raise MatrixFileError(f"{what}: expected shape ({d}, {d}, 2), got {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def template_to_dict(t: CircuitTemplate) -> dict:
    records = []
    for layer in t.layers:
        if isinstance(layer, Query):
            records.append({"kind": "query"})
        else:
            records.append({
                "kind": "local",
                "factor_a": _matrix_to_lists(layer.factor_a),
                "factor_b": _matrix_to_lists(layer.factor_b),
            })
    return {"d_a": t.d_a, "d_b": t.d_b, "layers": records}


def template_from_dict(data: dict) -> CircuitTemplate:
    try:
        d_a = int(data["d_a"])
        d_b = int(data["d_b"])
        records = data["layers"]
    except (KeyError, TypeError, ValueError) as exc:
        raise MatrixFileError(f"malformed template record: {exc}") from exc
    layers: list = []
    for rec in records:
        kind = rec.get("kind")
        if kind == "query":
            layers.append(QUERY)
        elif kind == "local":
            layers.append(LocalLayer(
                _matrix_from_lists(rec["factor_a"], d_a, "factor_a"),
                _matrix_from_lists(rec["factor_b"], d_b, "factor_b"),
            ))
        else:
            raise MatrixFileError(f"unknown layer kind {kind!r}")
    return CircuitTemplate(d_a, d_b, layers)


def dumps_template(t: CircuitTemplate) -> str:
    return json.dumps(template_to_dict(t), indent=2)


def loads_template(text: str) -> CircuitTemplate:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MatrixFileError(f"invalid JSON: {exc}") from exc
    return template_from_dict(data)
