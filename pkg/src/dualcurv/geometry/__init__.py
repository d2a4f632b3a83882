"""Convex bodies, subspaces and the geometric primitives acting on them."""
from .bodies import (
    Ball,
    BodyDescriptor,
    HPolytope,
    ProductBall,
    VPolytope,
    ball,
    hpolytope,
    product_ball,
    vpolytope,
)
from .io import body_from_dict, body_to_dict, load_body, save_body
from .ops import (
    AsymmetryResult,
    Section,
    asymmetry_constant,
    centroid,
    cone_decomposition,
    containment_bisection,
    project_body,
    radial,
    radial_extended,
    radial_gauss,
    radial_gauss_many,
    radial_many,
    scale,
    section_intervals,
    slice_body,
    support,
    support_many,
    translate,
    volume,
)
from .subspace import Subspace

__all__ = [
    "AsymmetryResult", "Ball", "BodyDescriptor", "HPolytope", "ProductBall", "Section",
    "Subspace", "VPolytope", "asymmetry_constant", "ball", "body_from_dict", "body_to_dict",
    "centroid", "cone_decomposition", "containment_bisection", "hpolytope", "load_body",
    "product_ball", "project_body", "radial", "radial_extended", "radial_gauss",
    "radial_gauss_many", "radial_many", "save_body", "scale", "section_intervals",
    "slice_body", "support", "support_many", "translate", "volume", "vpolytope",
]
