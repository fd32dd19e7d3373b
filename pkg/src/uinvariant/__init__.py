"""Facial state sums for framed links and tangles, with the u-invariant."""

from .cyclotomic import CycInt, SqrtExt, ONE, ZERO, U, Y
from .diagram import (
    PDCode,
    ClosedDiagram,
    Piece,
    UNKNOT,
    parse_pd,
    parse_piece,
    compose_pieces,
    mirror,
)

__version__ = "0.1.0"

__all__ = [
    "CycInt",
    "SqrtExt",
    "ONE",
    "ZERO",
    "U",
    "Y",
    "PDCode",
    "ClosedDiagram",
    "Piece",
    "UNKNOT",
    "parse_pd",
    "parse_piece",
    "compose_pieces",
    "mirror",
]
