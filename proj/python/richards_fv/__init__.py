"""Finite-volume Richards equation solver for layered porous media."""

from ._richards_fv import (
    mobility,
    rel_perm,
    resolved_config,
    rock_presets,
    run,
    saturation,
    saturation_inverse,
)

__all__ = [
    "mobility",
    "rel_perm",
    "resolved_config",
    "rock_presets",
    "run",
    "saturation",
    "saturation_inverse",
]
