"""Saliency maps and weakly-supervised localization from exported activations."""

from ._core import (
    METHODS,
    SCHEMA_VERSION,
    SarcamError,
    auto_intermediate_side,
    colorize,
    compute_cam,
    iou,
    load_bundle,
    localize,
    normalize_minmax,
    overlay,
    resize_bilinear,
    save_bundle,
    sweep,
    validate_bundle,
)

__version__ = "0.1.0"

__all__ = [
    "METHODS",
    "SCHEMA_VERSION",
    "SarcamError",
    "auto_intermediate_side",
    "colorize",
    "compute_cam",
    "iou",
    "load_bundle",
    "localize",
    "normalize_minmax",
    "overlay",
    "resize_bilinear",
    "save_bundle",
    "sweep",
    "validate_bundle",
]
