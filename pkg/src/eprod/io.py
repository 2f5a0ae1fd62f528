"""JSON interchange for operators, kets, certificates and product operators; CSV writers.

Interchange document::

    {"dims": [d1, ..., dp], "kind": "operator" | "ket", "entries": [[re, im], ...]}

Entries are row-major over the full index (operators: ``D*D`` pairs,
kets: ``D`` pairs).
"""

from __future__ import annotations

import csv
import io as _io
import json
import math
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .dnorm import NormCertificate
from .factorize import ProductOperator
from .tensor import Ket, MultipartiteOperator, ProductKet, ShapeError, ValidationError

KINDS = ("operator", "ket", "certificate", "product_operator")


class ParseError(ValueError):
    pass


def _encode(arr) -> list[list[float]]:
    a = np.asarray(arr, dtype=complex).ravel()
    return [[float(z.real), float(z.imag)] for z in a]


def _decode(entries, expected: int) -> np.ndarray:
    try:
        a = np.asarray(entries, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"entries are not numeric [re, im] pairs: {exc}") from None
    if a.ndim != 2 or a.shape[1] != 2:
        raise ParseError("entries must be a list of [re, im] pairs")
    if a.shape[0] != expected:
        raise ParseError(f"expected {expected} entries, got {a.shape[0]}")
    if not np.all(np.isfinite(a)):
        raise ParseError("entries must be finite")
    return a[:, 0] + 1j * a[:, 1]


def _dims(doc) -> tuple[int, ...]:
    dims = doc.get("dims")
    if not isinstance(dims, list) or not dims or not all(isinstance(d, int) and d >= 1 for d in dims):
        raise ParseError("dims must be a non-empty list of positive integers")
    return tuple(dims)


def operator_to_doc(A: MultipartiteOperator) -> dict:
    return {"dims": list(A.dims), "kind": "operator", "entries": _encode(A.entries)}


def ket_to_doc(k: Ket) -> dict:
    return {"dims": list(k.shape.dims), "kind": "ket", "entries": _encode(k.amp)}


def certificate_to_doc(cert: NormCertificate) -> dict:
    return {
        "kind": "certificate",
        "value": cert.value,
        "method": cert.method,
        "converged": cert.converged,
        "sweeps_used": cert.sweeps_used,
        "restarts_used": cert.restarts_used,
        "left": [{"dims": [len(f)], "kind": "ket", "entries": _encode(f)} for f in cert.left.factors],
        "right": [{"dims": [len(f)], "kind": "ket", "entries": _encode(f)} for f in cert.right.factors],
    }


def product_operator_to_doc(P: ProductOperator) -> dict:
    return {
        "kind": "product_operator",
        "dims": list(P.dims),
        "scale": [P.scale.real, P.scale.imag],
        "source_trace": [P.source_trace.real, P.source_trace.imag],
        "factors": [operator_to_doc(f) for f in P.factors],
    }


def to_doc(obj) -> dict:
    if isinstance(obj, MultipartiteOperator):
        return operator_to_doc(obj)
    if isinstance(obj, Ket):
        return ket_to_doc(obj)
    if isinstance(obj, NormCertificate):
        return certificate_to_doc(obj)
    if isinstance(obj, ProductOperator):
        return product_operator_to_doc(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _factor_list(docs) -> tuple[np.ndarray, ...]:
    out = []
    for d in docs:
        (n,) = _dims(d)
        out.append(_decode(d.get("entries"), n))
    return tuple(out)


def from_doc(doc: Mapping[str, Any]):
    """Inverse of :func:`to_doc`."""
    if not isinstance(doc, Mapping):
        raise ParseError("document must be a JSON object")
    kind = doc.get("kind")
    if kind not in KINDS:
        raise ParseError(f"kind must be one of {KINDS}, got {kind!r}")
    try:
        if kind == "operator":
            dims = _dims(doc)
            D = math.prod(dims)
            return MultipartiteOperator(dims, _decode(doc.get("entries"), D * D).reshape(D, D))
        if kind == "ket":
            dims = _dims(doc)
            return Ket(dims, _decode(doc.get("entries"), math.prod(dims)))
        if kind == "product_operator":
            factors = tuple(from_doc(f) for f in doc["factors"])
            scale = complex(*doc["scale"])
            src = complex(*doc["source_trace"])
            return ProductOperator(factors, scale, src)
        left, right = ProductKet(_factor_list(doc["left"])), ProductKet(_factor_list(doc["right"]))
        return NormCertificate(
            value=float(doc["value"]),
            left=left,
            right=right,
            sweeps_used=int(doc.get("sweeps_used", 0)),
            restarts_used=int(doc.get("restarts_used", 0)),
            converged=bool(doc.get("converged", True)),
            method=str(doc.get("method", "alternating")),
        )
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed {kind} document: {exc}") from None
    except (ShapeError, ValidationError) as exc:
        raise ParseError(str(exc)) from None


def dumps(obj, **kw) -> str:
    return json.dumps(to_doc(obj), **kw)


def loads(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    return from_doc(doc)


def save(obj, path) -> None:
    Path(path).write_text(dumps(obj))


def load(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    return loads(text)


def load_operator(path) -> MultipartiteOperator:
    """Read an operator file; a ket document is promoted to its projector."""
    obj = load(path)
    if isinstance(obj, Ket):
        return MultipartiteOperator.projector(obj)
    if isinstance(obj, ProductOperator):
        return obj.assemble()
    if not isinstance(obj, MultipartiteOperator):
        raise ParseError(f"expected an operator or ket, got {type(obj).__name__}")
    return obj


# CSV

MEASURE_COLUMNS = ("family", "N", "p", "base", "epsilon", "norm_A", "norm_prod", "converged")
SWEEP_COLUMNS = ("g", "b", "epsilon_closed", "epsilon_pipeline", "magnetization", "converged")
REGIME_COLUMNS = ("transition", "regime", "p", "N", "epsilon", "omega")


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(rows: Iterable[Mapping[str, Any]], columns: Sequence[str], out=None) -> str:
    """Write rows in a fixed column order; missing fields are empty. Returns the text."""
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(row.get(c)) for c in columns])
    text = buf.getvalue()
    if out is not None:
        if hasattr(out, "write"):
            out.write(text)
        else:
            Path(out).write_text(text)
    return text


def read_csv(text: str) -> list[dict[str, str]]:
    return list(csv.DictReader(_io.StringIO(text)))
