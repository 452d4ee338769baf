"""Isotropic curves in the complex quadric: jets, moving frames, invariants,
synthesis from prescribed differentials, deformations and tamed surfaces."""

from .curves import (
    Bryant,
    ConstantBending,
    Exceptional1,
    Goursat,
    LegendreCurve,
    StandardCycle,
    WCurve,
    kuy_example,
    model_from_descriptor,
)
from .errors import InputError, IsoqError, NumericalError
from .frames import bending, contact_order, quadratic_ddelta, quartic_delta, r_map
from .synthesis import equivalent, synthesize

__version__ = "0.1.0"

__all__ = [
    "Bryant", "ConstantBending", "Exceptional1", "Goursat", "LegendreCurve", "StandardCycle",
    "WCurve", "kuy_example", "model_from_descriptor", "InputError", "IsoqError", "NumericalError",
    "bending", "contact_order", "quadratic_ddelta", "quartic_delta", "r_map", "equivalent",
    "synthesize",
]
