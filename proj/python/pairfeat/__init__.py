"""Python access to the pairfeat pipeline: corners, descriptors, Delaunay
pairing, metrics, feature files and the command-line driver."""

from ._pairfeat import (
    PairfeatError,
    delaunay,
    describe,
    detect,
    joint_map,
    load_image,
    metrics,
    midpoint,
    read_features,
    run_cli,
    score_field,
    synthetic_image,
    white_square_image,
    write_features,
    write_pgm,
)

__all__ = [
    "PairfeatError",
    "delaunay",
    "describe",
    "detect",
    "joint_map",
    "load_image",
    "metrics",
    "midpoint",
    "read_features",
    "run_cli",
    "score_field",
    "synthetic_image",
    "white_square_image",
    "write_features",
    "write_pgm",
]
