"""Body JSON files.

Schema::

    {"name": str, "dim": int, "kind": "hpolytope" | "vpolytope" | "product_ball" | "ball",
     "A": [[float]], "b": [float],      # hpolytope
     "vertices": [[float]],             # vpolytope
     "k": int,                          # product_ball
     "radius": float}                   # ball (optional, default 1)
"""
import json

import numpy as np

from ..exceptions import BodyFileError, InvariantError
from .bodies import Ball, BodyDescriptor, HPolytope, ProductBall, VPolytope

KINDS = ("hpolytope", "vpolytope", "product_ball", "ball")


def _require(doc, key, kind):
    if key not in doc:
        raise BodyFileError("schema", f"kind {kind!r} requires field {key!r}")
    return doc[key]


def body_from_dict(doc):
    """Build and validate a body; failures raise :class:`BodyFileError`."""
    if not isinstance(doc, dict):
        raise BodyFileError("schema", "top level must be a JSON object")
    for key in ("name", "dim", "kind"):
        if key not in doc:
            raise BodyFileError("schema", f"missing field {key!r}")
    kind, dim = doc["kind"], doc["dim"]
    if kind not in KINDS:
        raise BodyFileError("schema", f"unknown kind {kind!r}")
    if not isinstance(dim, int) or dim < 1:
        raise BodyFileError("schema", "dim must be a positive integer")
    try:
        if kind == "hpolytope":
            a = np.asarray(_require(doc, "A", kind), dtype=float)
            b = np.asarray(_require(doc, "b", kind), dtype=float)
            if a.ndim != 2 or a.shape[1] != dim:
                raise BodyFileError("dim_consistent", f"A must be m x {dim}")
            shape = HPolytope.from_inequalities(a, b)
        elif kind == "vpolytope":
            v = np.asarray(_require(doc, "vertices", kind), dtype=float)
            if v.ndim != 2 or v.shape[1] != dim:
                raise BodyFileError("dim_consistent", f"vertices must be N x {dim}")
            shape = VPolytope.from_points(v)
        elif kind == "product_ball":
            shape = ProductBall(dim, int(_require(doc, "k", kind)))
        else:
            shape = Ball(dim, float(doc.get("radius", 1.0)))
    except InvariantError as exc:
        raise BodyFileError(exc.invariant, str(exc)) from exc
    except (TypeError, ValueError) as exc:
        raise BodyFileError("schema", str(exc)) from exc
    return BodyDescriptor(str(doc["name"]), shape)


def body_to_dict(body):
    doc = {"name": body.name, "dim": body.dim, "kind": body.kind}
    shape = body.shape
    if body.kind == "hpolytope":
        doc["A"] = shape.normals.tolist()
        doc["b"] = shape.offsets.tolist()
    elif body.kind == "vpolytope":
        doc["vertices"] = shape.vertices.tolist()
    elif body.kind == "product_ball":
        doc["k"] = shape.k
    else:
        doc["radius"] = shape.radius
    return doc


def load_body(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError as exc:
        raise BodyFileError("file", f"body file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise BodyFileError("json", f"{path}: {exc}") from exc
    return body_from_dict(doc)


def save_body(body, path):
    from ..reports import dumps

    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(body_to_dict(body)))
        fh.write("\n")
