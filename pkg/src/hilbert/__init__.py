from src.hilbert.cnd import CndVerdict, cnd_check, cnd_function_check
from src.hilbert.cocycles import (
    Cocycle,
    FreeWallCocycle,
    LatticeCocycle,
    RegularCoboundary,
    free_wall_cocycle,
    lattice_cocycle,
    properness_profile,
    regular_cocycle,
)
from src.hilbert.isometries import AffineIsometry, IdentityLinear, OrthogonalMatrix, SignedPermutation
from src.hilbert.vectors import HilbertVec

__all__ = [
    "AffineIsometry",
    "CndVerdict",
    "Cocycle",
    "FreeWallCocycle",
    "HilbertVec",
    "IdentityLinear",
    "LatticeCocycle",
    "OrthogonalMatrix",
    "RegularCoboundary",
    "SignedPermutation",
    "cnd_check",
    "cnd_function_check",
    "free_wall_cocycle",
    "lattice_cocycle",
    "properness_profile",
    "regular_cocycle",
]
