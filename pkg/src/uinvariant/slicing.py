"""Cut a closed diagram into a stack of one-crossing pieces.

A disk region grows one crossing at a time.  Its boundary is the cyclic
list of half-edges leaving the region, counterclockwise.  A crossing may
join when the half-edges reaching it form one contiguous run of that list
and arrive at consecutive slots.  Each step yields a piece holding the new
crossing, with the old boundary as upper hole and the new one as lower hole.
"""

from __future__ import annotations

import random
from typing import Optional, Sequence

from .diagram import ClosedDiagram, DiagramError, Piece, PDCode

__all__ = ["slice_diagram", "SliceError"]


class SliceError(DiagramError):
    """No valid slicing order exists from the chosen start."""


def _block(boundary: list, alpha: dict, c: int) -> Optional[tuple[int, list]]:
    """Rotation offset and matching slots if ``c`` can join, else None."""
    n = len(boundary)
    hits = [t for t, h in enumerate(boundary) if alpha[h][0] == c]
    if not hits:
        return None
    p = len(hits)
    for start in range(n) if p == n else [t for t in hits if (t - 1) % n not in hits]:
        run = [boundary[(start + t) % n] for t in range(p)]
        if any(alpha[h][0] != c for h in run):
            continue
        slots = [alpha[h][1] for h in run]
        if all(slots[t + 1] == (slots[t] - 1) % 4 for t in range(p - 1)):
            return start, slots
    return None


def _grow(boundary: list, alpha: dict, c: int, start: int, slots: list) -> list:
    n, p = len(boundary), len(slots)
    rest = [boundary[(start + p + t) % n] for t in range(n - p)]
    base = slots[0] + 1 if slots else 0
    new = [(c, (base + t) % 4) for t in range(4 - p)]
    # drop kinks: two adjacent remaining slots joined by one edge
    changed = True
    while changed:
        changed = False
        for t in range(len(new) - 1):
            if alpha[new[t]] == new[t + 1]:
                del new[t:t + 2]
                changed = True
                break
    return new + rest


def _order(d: ClosedDiagram, rng: Optional[random.Random], first: Optional[int]):
    alpha = d._alpha
    V = d.num_crossings
    c0 = first if first is not None else (rng.randrange(V) if rng else 0)
    inside = {c0}
    boundary = _grow([], alpha, c0, 0, [])  # all four slots
    steps = [(c0, [], boundary)]
    while len(inside) < V:
        cands = []
        for c in sorted({alpha[h][0] for h in boundary} - inside):
            b = _block(boundary, alpha, c)
            if b is not None:
                cands.append((c, b))
        if not cands:
            return None
        c, (start, slots) = rng.choice(cands) if rng else cands[0]
        new = _grow(boundary, alpha, c, start, slots)
        steps.append((c, boundary, new))
        boundary = new
        inside.add(c)
    return steps


def slice_diagram(pd, seed: Optional[int] = None, order: Optional[Sequence[int]] = None) -> list[Piece]:
    """Pieces from top to bottom whose composite is isomorphic to ``pd``.

    With ``seed`` the crossing order is randomized; ``order`` forces it (a
    :class:`SliceError` is raised if some prefix is not a valid region).
    """
    d = pd if isinstance(pd, ClosedDiagram) else ClosedDiagram(pd)
    if d.is_unknot() or d.genus != 0:
        raise SliceError("slicing needs a planar diagram with crossings")
    alpha = d._alpha
    if order is not None:
        order = list(order)
        if sorted(order) != list(range(d.num_crossings)):
            raise SliceError("order must list every crossing once")
        boundary = _grow([], alpha, order[0], 0, [])
        steps = [(order[0], [], boundary)]
        for c in order[1:]:
            b = _block(boundary, alpha, c)
            if b is None:
                raise SliceError(f"crossing {c} cannot join the region at this point")
            new = _grow(boundary, alpha, c, *b)
            steps.append((c, boundary, new))
            boundary = new
    else:
        rng = random.Random(seed) if seed is not None else None
        steps = None
        starts = list(range(d.num_crossings))
        if rng:
            rng.shuffle(starts)
        for first in starts:
            steps = _order(d, rng, first)
            if steps is not None:
                break
        if steps is None:
            raise SliceError("no slicing order found")
    rot = d.rotations
    label = lambda h: rot[h[0]][h[1]]  # noqa: E731
    pieces = []
    for c, before, after in steps:
        upper = [label(h) for h in reversed(before)] if before else None
        lower = [label(h) for h in after] if after else None
        pieces.append(Piece([rot[c]], upper, lower))
    return pieces
