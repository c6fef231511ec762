"""JSON documents for operator tuples and matrices.

A tuple document looks like::

    {"schemaVersion": 1, "n": 2, "dim": 3,
     "operators": [[[[re, im], ...], ...], ...],
     "metadata": {"seed": 7, "generator": "random"}}

Complex entries are ``[re, im]`` pairs and matrices are row-major nested
lists.  Floats are written with ``repr`` precision, so a round trip is
bit-exact.
"""
import json

import numpy as np

from .errors import ParseError
from .opcore import OperatorTuple, as_tuple

SCHEMA_VERSION = 1


def encode_matrix(M):
    M = np.asarray(M, dtype=complex)
    return [[[float(x.real), float(x.imag)] for x in row] for row in M]


def decode_matrix(obj, path="matrix", shape=None):
    if not isinstance(obj, list) or not obj:
        raise ParseError(f"{path}: expected a non-empty list of rows", path=path)
    rows = []
    for i, row in enumerate(obj):
        if not isinstance(row, list):
            raise ParseError(f"{path}[{i}]: expected a list of [re, im] pairs", path=f"{path}[{i}]")
        vals = []
        for j, entry in enumerate(row):
            where = f"{path}[{i}][{j}]"
            if (not isinstance(entry, list) or len(entry) != 2
                    or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in entry)):
                raise ParseError(f"{where}: expected [re, im] with numeric parts, got {entry!r}", path=where)
            vals.append(complex(entry[0], entry[1]))
        rows.append(vals)
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ParseError(f"{path}: rows have unequal lengths {sorted(widths)}", path=path)
    M = np.array(rows, dtype=complex)
    if shape is not None and M.shape != shape:
        raise ParseError(f"{path}: expected shape {shape}, got {M.shape}", path=path)
    if not np.all(np.isfinite(M)):
        raise ParseError(f"{path}: non-finite entry", path=path)
    return M


def tuple_to_document(T, metadata=None):
    T = as_tuple(T)
    doc = {"schemaVersion": SCHEMA_VERSION, "n": T.n, "dim": T.dim,
           "operators": [encode_matrix(t) for t in T]}
    if metadata:
        doc["metadata"] = dict(metadata)
    return doc


def dumps_tuple(T, metadata=None):
    return json.dumps(tuple_to_document(T, metadata), indent=None) + "\n"


def _load_json(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}",
                         line=exc.lineno, column=exc.colno) from exc


def document_to_tuple(doc):
    if not isinstance(doc, dict):
        raise ParseError("top level: expected an object", path="$")
    if doc.get("schemaVersion") != SCHEMA_VERSION:
        raise ParseError(f"schemaVersion: expected {SCHEMA_VERSION}, got {doc.get('schemaVersion')!r}",
                         path="schemaVersion")
    for key in ("n", "dim"):
        v = doc.get(key)
        if not isinstance(v, int) or isinstance(v, bool) or v < 1:
            raise ParseError(f"{key}: expected a positive integer, got {v!r}", path=key)
    n, dim = doc["n"], doc["dim"]
    ops = doc.get("operators")
    if not isinstance(ops, list) or len(ops) != n:
        raise ParseError(f"operators: expected a list of {n} matrices", path="operators")
    mats = [decode_matrix(m, f"operators[{k}]", (dim, dim)) for k, m in enumerate(ops)]
    return OperatorTuple(np.array(mats))


def loads_tuple(text):
    return document_to_tuple(_load_json(text))


def load_tuple(path):
    with open(path) as fh:
        return loads_tuple(fh.read())


def save_tuple(path, T, metadata=None):
    with open(path, "w") as fh:
        fh.write(dumps_tuple(T, metadata))


def loads_matrix(text):
    """A bare nested list or an object with a ``matrix`` key."""
    obj = _load_json(text)
    if isinstance(obj, dict):
        if "matrix" not in obj:
            raise ParseError("expected a 'matrix' key", path="matrix")
        obj = obj["matrix"]
    return decode_matrix(obj)


def load_matrix(path):
    with open(path) as fh:
        return loads_matrix(fh.read())
