"""The u-invariant: a two-symbol facial state sum with values in Z[u].

Faces are white or black and two black faces may not be adjacent.  The
framed invariant is the closed state sum; dividing by the unknot value 1+2y
and undoing the framing with ``u ** -self_writhe`` gives the normalized
value, which is 1 on the unknot.
"""

from __future__ import annotations

from typing import Optional

from .cyclotomic import ONE, S, S_INV, U, Y, ZERO, CycInt
from .diagram import ClosedDiagram, DiagramError, PDCode, self_writhe
from .engine import Theory, eval_closed, eval_partial

__all__ = [
    "WHITE",
    "BLACK",
    "U_THEORY",
    "VALUES",
    "FOURJ_BY_CODE",
    "fourj_code",
    "eval_u",
    "eval_u_framed_normalized",
    "eval_u_normalized",
    "relation_polynomials",
    "check_relations",
    "curl_factor",
    "facial_inverse_check",
    "dot_value",
    "as_diagram",
]

WHITE, BLACK = 0, 1

u = U
VALUES = {
    "z": -(u ** 2) - u ** 3,
    "a": -(u ** 3),
    "d": -(u ** 3),
    "b": -(u ** 2),
    "h": -(u ** 2),
    "e": u,
    "j": u ** 4,
    "x": ONE,
    "y": Y,
}

# bits east, north, west, south with east most significant; black = 1
FOURJ_BY_CODE = {
    0b0000: VALUES["z"],
    0b0001: VALUES["a"],
    0b0100: VALUES["d"],
    0b0010: VALUES["b"],
    0b1000: VALUES["h"],
    0b0101: VALUES["e"],
    0b1010: VALUES["j"],
}


def fourj_code(east: int, north: int, west: int, south: int) -> int:
    return 8 * east + 4 * north + 2 * west + south


def _fourj_table() -> dict:
    table = {}
    for code, val in FOURJ_BY_CODE.items():
        key = ((code >> 3) & 1, (code >> 2) & 1, (code >> 1) & 1, code & 1)
        table[key] = val
    return table


U_THEORY = Theory(
    name="u",
    symbols=("white", "black"),
    fourj=_fourj_table(),
    forbidden=frozenset({(BLACK, BLACK)}),
    face_value=(ONE, Y),
    face_value_inv=(ONE, ONE + Y),
    zero=ZERO,
    one=ONE,
    face_root=(ONE, S),
    face_root_inv=(ONE, S_INV),
)


def as_diagram(obj) -> ClosedDiagram:
    if isinstance(obj, ClosedDiagram):
        return obj
    if isinstance(obj, PDCode):
        return ClosedDiagram(obj)
    raise TypeError(f"expected a PDCode or ClosedDiagram, got {type(obj).__name__}")


def eval_u(diagram, parallel: Optional[int] = None) -> CycInt:
    """The framed invariant ``[K]_u``."""
    value = eval_closed(as_diagram(diagram), U_THEORY, parallel=parallel)
    return value.to_cyc() if hasattr(value, "to_cyc") else value


def _require_planar(d: ClosedDiagram) -> None:
    if d.genus != 0:
        raise DiagramError(f"normalization needs a planar diagram, got genus {d.genus}")


def eval_u_framed_normalized(diagram, parallel: Optional[int] = None) -> CycInt:
    """``[K]_u / (1+2y)`` at the diagram's own framing."""
    d = as_diagram(diagram)
    _require_planar(d)
    return eval_u(d, parallel).div_norm()


def eval_u_normalized(diagram, parallel: Optional[int] = None) -> CycInt:
    """``{K}_u``: framing 0 and divided by the unknot value."""
    d = as_diagram(diagram)
    _require_planar(d)
    sw = self_writhe(d)
    return CycInt.power_of_u(-sw % 5) * eval_u(d, parallel).div_norm()


# ---------------------------------------------------------------------------
# relations and identities


def relation_polynomials(v: Optional[dict] = None) -> list[tuple[str, CycInt]]:
    """The six quadratic and five cubic relations, evaluated on ``v``."""
    v = VALUES if v is None else v
    z, a, b, e, j, x, y = (v[k] for k in "zabejxy")
    return [
        ("z^2 x^2 + a b x y - 1", z * z * x * x + a * b * x * y - 1),
        ("a b x^2 - 1", a * b * x * x - 1),
        ("z b x + a j y", z * b * x + a * j * y),
        ("e j x^2 - 1", e * j * x * x - 1),
        ("z a x + b e y", z * a * x + b * e * y),
        ("a b x y + e j y^2 - 1", a * b * x * y + e * j * y * y - 1),
        ("a (z^2 x + b e y - z b x)", a * (z * z * x + b * e * y - z * b * x)),
        ("z^2 b x + a^2 j y - z b^2 x", z * z * b * x + a * a * j * y - z * b * b * x),
        ("a (z b x + e j y - b j x)", a * (z * b * x + e * j * y - b * j * x)),
        ("b^2 e x - z a^2 x - b e^2 y", b * b * e * x - z * a * a * x - b * e * e * y),
        ("a^2 b x + e^2 j y - e j^2 x", a * a * b * x + e * e * j * y - e * j * j * x),
    ]


def check_relations() -> list[tuple[str, CycInt, bool]]:
    return [(name, val, not val) for name, val in relation_polynomials()]


def _fourj(i, j, k, l):
    return U_THEORY.fourj.get((i, j, k, l), ZERO)


def curl_factor(i: int, j: int) -> tuple[CycInt, bool]:
    """``sum_k x_k * x_{jiki}``; returns (value, allowed)."""
    if not U_THEORY.allowed(i, j):
        return ZERO, False
    total = ZERO
    for k in range(U_THEORY.nsym):
        total = total + U_THEORY.face_value[k] * _fourj(j, i, k, i)
    return total, True


def facial_inverse_check(i: int, j: int) -> Optional[bool]:
    """Whether ``x_i * sum_k x_k x_{kjij} x_{jijk} == 1``; None when {i,j} is forbidden."""
    if not U_THEORY.allowed(i, j):
        return None
    total = ZERO
    for k in range(U_THEORY.nsym):
        total = total + U_THEORY.face_value[k] * _fourj(k, j, i, j) * _fourj(j, i, j, k)
    return U_THEORY.face_value[i] * total == ONE


def dot_value(diagram, face: int, parallel: Optional[int] = None) -> CycInt:
    """State sum with one black dot in ``face`` and no facial factor there."""
    d = as_diagram(diagram)
    if not 0 <= face < d.num_faces:
        raise DiagramError(f"face {face} out of range 0..{d.num_faces - 1}")
    return eval_partial(d, U_THEORY, {face: BLACK}, parallel=parallel)
