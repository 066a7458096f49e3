"""Light transport layers: file I/O, composition, metrics and refinement.

Images are float32 NumPy arrays, (H, W) for occlusion and (H, W, 3) for RGB
layers. A layer set is a dict with keys occlusion, irradiance, albedo and
specular; a directional set has occlusion, albedo and (6, H, W, 3) stacks
under diffuse and specular.
"""

from ._core import (
    BASIS_COUNT,
    DEFAULT_EPSILON,
    DEFAULT_GAMMA,
    DimensionMismatch,
    Error,
    FormatError,
    IoError,
    compose,
    compose_directional,
    dssim,
    evaluate,
    gamma_decode,
    gamma_encode,
    nrmse,
    read_directional_layers,
    read_layers,
    read_linear,
    read_pfm,
    read_png,
    recombination_residuals,
    soft_cube_weights,
    upsample_layers,
    write_directional_layers,
    write_layers,
    write_pfm,
    write_png,
)
from .manifest import Record, read_manifest

__all__ = [
    "BASIS_COUNT",
    "DEFAULT_EPSILON",
    "DEFAULT_GAMMA",
    "DimensionMismatch",
    "Error",
    "FormatError",
    "IoError",
    "Record",
    "compose",
    "compose_directional",
    "dssim",
    "evaluate",
    "gamma_decode",
    "gamma_encode",
    "nrmse",
    "read_directional_layers",
    "read_layers",
    "read_linear",
    "read_manifest",
    "read_pfm",
    "read_png",
    "recombination_residuals",
    "soft_cube_weights",
    "upsample_layers",
    "write_directional_layers",
    "write_layers",
    "write_pfm",
    "write_png",
]
