"""Cone-adapted shearlet frames and shear-anisotropic Triebel-Lizorkin norms on the periodic grid."""

from .frame import FrequencyGrid, partition_of_unity
from .lattice import Band, ConeTag, ShearletIndex, System
from .spaces import SpaceParams, SStarParams, function_norm, sequence_norm
from .transform import CoefficientMap, PeriodicSignal, analyze, synthesize

__version__ = "0.1.0"

__all__ = [
    "Band",
    "CoefficientMap",
    "ConeTag",
    "FrequencyGrid",
    "PeriodicSignal",
    "SStarParams",
    "ShearletIndex",
    "SpaceParams",
    "System",
    "analyze",
    "function_norm",
    "partition_of_unity",
    "sequence_norm",
    "synthesize",
]
