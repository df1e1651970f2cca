"""Asymmetric geodesic dual-front image segmentation."""

from ._geofront import (
    euclidean_distance_map,
    eval_metric,
    farthest_point_sampling,
    geodesic_distance,
    jaccard,
    make_synthetic,
    segment,
)

__all__ = [
    "euclidean_distance_map",
    "eval_metric",
    "farthest_point_sampling",
    "geodesic_distance",
    "jaccard",
    "make_synthetic",
    "segment",
]
