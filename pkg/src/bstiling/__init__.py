"""Tilings of Baumslag-Solitar groups BS(m, n) in exact arithmetic.

Submodules: ``group`` (words, normal forms, plane projection), ``dynsys``
(the piecewise linear map T and its orbits), ``tiles`` (multiply-by-q tile
sets), ``coloring`` (the orbit coloring and patch verification), ``solver``
(finite-region tileability), ``reduction`` (affine systems to tile sets),
``render`` (plane-layout drawings) and ``cli``.
"""

from .group import BS32, GroupParams, NormalForm, PlanePoint, equal, normalize, project, psi
from .tiles import Carry, Tile, TileSet, kari_bs32_tileset

__all__ = [
    "BS32", "Carry", "GroupParams", "NormalForm", "PlanePoint", "Tile", "TileSet",
    "equal", "kari_bs32_tileset", "normalize", "project", "psi",
]

__version__ = "0.1.0"
