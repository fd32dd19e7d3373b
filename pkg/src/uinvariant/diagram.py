"""Planar diagram codes, combinatorial maps, faces and tangle pieces.

A crossing ``X[e0,e1,e2,e3]`` lists edge labels counterclockwise; the strand
through slots 0 and 2 passes under, the strand through slots 1 and 3 over.
Every crossing is a vertex of a combinatorial map whose rotation is the slot
order and whose edge involution pairs the two occurrences of each label.
Faces are the orbits of ``h -> rotation(involution(h))``.

Pieces (open tangles) carry up to one upper and one lower hole.  A hole is a
special vertex whose endpoints are listed from its marked point in the
boundary orientation the surface induces; that orientation runs clockwise
around the hole, so the rotation at the hole vertex is the reversed listing.
"""

from __future__ import annotations

import random
import re
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

__all__ = [
    "DiagramError",
    "PDParseError",
    "PDCode",
    "FaceInfo",
    "ClosedDiagram",
    "Piece",
    "UNKNOT",
    "parse_pd",
    "build_map",
    "trace_faces",
    "face_adjacency",
    "components",
    "self_writhe",
    "mirror",
    "parse_piece",
    "compose_pieces",
    "insert_r2",
    "insert_curl",
    "connected_sum",
    "relabel",
    "random_r2",
    "crossing_sign",
    "canonical_code",
    "identity_piece",
]


class DiagramError(ValueError):
    """A diagram or piece failed validation."""


class PDParseError(DiagramError):
    """Text could not be parsed as a PD code or piece description."""


Crossing = tuple  # 4-tuple of edge labels
HalfEdge = tuple  # (vertex, slot)


@dataclass(frozen=True)
class PDCode:
    crossings: tuple[Crossing, ...]

    def __post_init__(self) -> None:
        if not self.crossings:
            raise DiagramError(
                "empty PD code; encode a crossing-free circle with an R2 pair "
                "or use the built-in 'unknot'"
            )
        for x in self.crossings:
            if len(x) != 4:
                raise DiagramError(f"crossing {x} does not have 4 slots")
        counts = Counter(lab for x in self.crossings for lab in x)
        bad = sorted(lab for lab, c in counts.items() if c != 2)
        if bad:
            raise DiagramError(f"edge labels must occur exactly twice; offending labels {bad}")

    def __len__(self) -> int:
        return len(self.crossings)

    def labels(self) -> list:
        return sorted({lab for x in self.crossings for lab in x})

    def __str__(self) -> str:
        return " ".join("X[%s]" % ",".join(map(str, x)) for x in self.crossings)


_X_RE = re.compile(r"X\[([^\]]*)\]")


def _strip_comments(text: str) -> str:
    return "\n".join(line.split("#", 1)[0] for line in text.splitlines())


def parse_pd(text: str) -> PDCode:
    """Parse whitespace-separated ``X[a,b,c,d]`` tokens (``#`` starts a comment)."""
    body = _strip_comments(text)
    crossings = []
    pos = 0
    for m in _X_RE.finditer(body):
        if body[pos:m.start()].strip(" \t\r\n,"):
            raise PDParseError(f"unexpected text {body[pos:m.start()].strip()!r}")
        pos = m.end()
        try:
            labels = tuple(int(t) for t in m.group(1).split(","))
        except ValueError:
            raise PDParseError(f"non-integer label in X[{m.group(1)}]") from None
        if len(labels) != 4:
            raise PDParseError(f"X[{m.group(1)}] has {len(labels)} labels, expected 4")
        if any(lab <= 0 for lab in labels):
            raise PDParseError(f"labels must be positive in X[{m.group(1)}]")
        crossings.append(labels)
    if body[pos:].strip(" \t\r\n,"):
        raise PDParseError(f"unexpected text {body[pos:].strip()!r}")
    if not crossings:
        raise PDParseError("no crossings found")
    return PDCode(tuple(crossings))


# ---------------------------------------------------------------------------
# combinatorial map core


def _trace(rotations: Sequence[Sequence]) -> tuple[dict, list[list[HalfEdge]], dict]:
    """Return (involution, face orbits, half-edge -> face id)."""
    occ: dict = {}
    for v, rot in enumerate(rotations):
        for i, lab in enumerate(rot):
            occ.setdefault(lab, []).append((v, i))
    alpha = {}
    for lab, hs in occ.items():
        if len(hs) != 2:
            raise DiagramError(f"edge label {lab!r} occurs {len(hs)} times")
        alpha[hs[0]], alpha[hs[1]] = hs[1], hs[0]
    face_of: dict = {}
    orbits: list[list[HalfEdge]] = []
    for v, rot in enumerate(rotations):
        for i in range(len(rot)):
            h = (v, i)
            if h in face_of:
                continue
            orbit = []
            while h not in face_of:
                face_of[h] = len(orbits)
                orbit.append(h)
                w, j = alpha[h]
                h = (w, (j + 1) % len(rotations[w]))
            orbits.append(orbit)
    return alpha, orbits, face_of


def _connected(rotations: Sequence[Sequence], alpha: dict) -> bool:
    if not rotations:
        return True
    seen = {0}
    stack = [0]
    while stack:
        v = stack.pop()
        for i in range(len(rotations[v])):
            w = alpha[(v, i)][0]
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(rotations)


@dataclass(frozen=True)
class FaceInfo:
    """A traced face.

    ``corners`` lists ``(vertex, gap)`` pairs, gap ``i`` lying between slots
    ``i`` and ``i+1``.  ``boundary_arcs`` counts the hole arcs the face meets;
    its contribution exponent is ``1 - boundary_arcs/2``.
    """

    id: int
    corners: tuple[tuple[int, int], ...]
    boundary_arcs: int = 0

    @property
    def twice_exponent(self) -> int:
        return 2 - self.boundary_arcs

    @property
    def exponent(self) -> Fraction:
        return Fraction(self.twice_exponent, 2)

    @property
    def internal(self) -> bool:
        return self.boundary_arcs == 0


def _adjacency(rotations, face_of) -> frozenset:
    pairs = set()
    for (v, i), f in face_of.items():
        g = face_of[(v, (i + 1) % len(rotations[v]))]
        pairs.add((min(f, g), max(f, g)))
    return frozenset(pairs)


def _corner_faces(rotations, face_of, nvert) -> tuple[tuple[int, ...], ...]:
    return tuple(
        tuple(face_of[(v, (i + 1) % len(rotations[v]))] for i in range(len(rotations[v])))
        for v in range(nvert)
    )


# ---------------------------------------------------------------------------
# closed diagrams


class ClosedDiagram:
    """A link diagram in a closed oriented surface, with all derived data.

    Attributes
    ----------
    pd : PDCode or None (``None`` only for :data:`UNKNOT`)
    faces : tuple of FaceInfo
    corner_faces : per crossing, the face id at gaps 0..3
    adjacency : frozenset of (f, g) with f <= g; (f, f) marks self-adjacency
    genus : int
    """

    def __init__(self, pd: Optional[PDCode], *, _unknot: bool = False) -> None:
        self.pd = pd
        if _unknot:
            self.rotations = ()
            self.orbits = ()
            self.faces = (FaceInfo(0, ()), FaceInfo(1, ()))
            self.corner_faces = ()
            self.adjacency = frozenset({(0, 1)})
            self.genus = 0
            self._alpha = {}
            self._face_of = {}
            return
        rotations = tuple(tuple(x) for x in pd.crossings)
        alpha, orbits, face_of = _trace(rotations)
        V, E, F = len(rotations), 2 * len(rotations), len(orbits)
        chi = V - E + F
        if chi > 2 or chi % 2:
            raise DiagramError(
                f"V-E+F = {chi} gives no valid genus (disconnected diagram?)"
            )
        self.rotations = rotations
        self._alpha = alpha
        self._face_of = face_of
        self.orbits = tuple(tuple(o) for o in orbits)
        self.genus = (2 - chi) // 2
        self.corner_faces = _corner_faces(rotations, face_of, V)
        corners: dict = {f: [] for f in range(F)}
        for v in range(V):
            for gap in range(4):
                corners[self.corner_faces[v][gap]].append((v, gap))
        self.faces = tuple(FaceInfo(f, tuple(corners[f])) for f in range(F))
        self.adjacency = _adjacency(rotations, face_of)

    @property
    def num_crossings(self) -> int:
        return len(self.rotations)

    @property
    def num_faces(self) -> int:
        return len(self.faces)

    @property
    def V(self) -> int:
        return len(self.rotations)

    @property
    def E(self) -> int:
        return 2 * len(self.rotations)

    @property
    def F(self) -> int:
        return len(self.faces)

    @property
    def euler_characteristic(self) -> int:
        return 2 - 2 * self.genus

    def is_unknot(self) -> bool:
        return self.pd is None

    def crossing_corners(self, v: int) -> tuple[int, int, int, int]:
        """Face ids (east, north, west, south) at crossing ``v``.

        With the under strand drawn west to east and the picture rotated so
        the over strand runs northeast to southwest, east is gap 2, north gap
        3, west gap 0 and south gap 1.
        """
        g = self.corner_faces[v]
        return (g[2], g[3], g[0], g[1])

    def face_edges(self, f: int) -> list:
        """Edge labels along the boundary walk of face ``f`` with their half-edges."""
        return [(self.rotations[v][i], (v, i)) for v, i in self.orbits[f]]

    def components(self) -> tuple[tuple, ...]:
        return components(self)

    def self_writhe(self) -> int:
        return self_writhe(self)

    def __repr__(self) -> str:
        if self.pd is None:
            return "ClosedDiagram(unknot)"
        return f"ClosedDiagram({self.pd})"


UNKNOT = ClosedDiagram(None, _unknot=True)


def build_map(pd: PDCode) -> ClosedDiagram:
    return ClosedDiagram(pd)


def trace_faces(diagram) -> tuple[FaceInfo, ...]:
    return diagram.faces


def face_adjacency(diagram) -> frozenset:
    return diagram.adjacency


def _strands(diagram: ClosedDiagram):
    """Thread components; returns (component id, entry slot) per (crossing, strand)."""
    rot, alpha = diagram.rotations, diagram._alpha
    comp: dict = {}
    entry: dict = {}
    labels: list[list] = []
    for v in range(len(rot)):
        for s in (0, 1):
            if (v, s) in comp:
                continue
            cid = len(labels)
            labels.append([])
            h = (v, s)
            while True:
                w, i = h
                key = (w, i % 2)
                if key in comp:
                    break
                comp[key] = cid
                entry[key] = i
                out = (w, (i + 2) % 4)
                labels[cid].append(rot[w][out[1]])
                h = alpha[out]
    return comp, entry, labels


def components(diagram: ClosedDiagram) -> tuple[tuple, ...]:
    """Link components, each as the edge labels met along a traversal."""
    if diagram.is_unknot():
        return ((),)
    return tuple(tuple(c) for c in _strands(diagram)[2])


def crossing_sign(entry_under: int, entry_over: int) -> int:
    # positive when the over strand runs 3 -> 1 while the under strand runs 0 -> 2
    return 1 if (entry_under == 0) == (entry_over == 3) else -1


def self_writhe(diagram: ClosedDiagram) -> int:
    """Sum of crossing signs over self-crossings of components."""
    if diagram.is_unknot():
        return 0
    comp, entry, _ = _strands(diagram)
    total = 0
    for v in range(diagram.num_crossings):
        if comp[(v, 0)] == comp[(v, 1)]:
            total += crossing_sign(entry[(v, 0)], entry[(v, 1)])
    return total


def mirror(pd: PDCode) -> PDCode:
    return PDCode(tuple((a, d, c, b) for a, b, c, d in pd.crossings))


def relabel(pd: PDCode, mapping: dict) -> PDCode:
    return PDCode(tuple(tuple(mapping[lab] for lab in x) for x in pd.crossings))


def _fresh(pd: PDCode) -> int:
    return max(lab for x in pd.crossings for lab in x) + 1


def _occurrences(pd: PDCode, label) -> list[HalfEdge]:
    return [(v, i) for v, x in enumerate(pd.crossings) for i, lab in enumerate(x) if lab == label]


def _set_label(crossings: list[list], h: HalfEdge, label) -> None:
    crossings[h[0]][h[1]] = label


def insert_curl(pd: PDCode, edge: int, sign: int = 1) -> PDCode:
    """Add a kink on ``edge``; its self-writhe contribution is ``sign``."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    occ = _occurrences(pd, edge)
    if len(occ) != 2:
        raise DiagramError(f"edge {edge} not in diagram")
    m, f = _fresh(pd), _fresh(pd) + 1
    crossings = [list(x) for x in pd.crossings]
    _set_label(crossings, occ[1], f)
    crossings.append([m, m, edge, f] if sign == 1 else [edge, m, m, f])
    return PDCode(tuple(tuple(x) for x in crossings))


def insert_r2(pd: PDCode, face: int, edge1: int, edge2: int, over: int = 1) -> PDCode:
    """Push ``edge1`` across ``face`` and past ``edge2``, creating a bigon.

    ``over`` selects which of the two strands passes over (1 or 2).
    """
    diagram = ClosedDiagram(pd)
    if edge1 == edge2:
        raise DiagramError("R2 needs two distinct edges")
    walk = diagram.face_edges(face)
    steps = {}
    for lab, h in walk:
        steps.setdefault(lab, h)
    if edge1 not in steps or edge2 not in steps:
        raise DiagramError(f"edges {edge1}, {edge2} are not both on face {face}")
    p1 = steps[edge1]
    q1 = diagram._alpha[p1]
    p2 = steps[edge2]
    q2 = diagram._alpha[p2]
    n = _fresh(pd)
    s1low, s2mid, yq1, xq2 = n, n + 1, n + 2, n + 3
    crossings = [list(x) for x in pd.crossings]
    _set_label(crossings, q1, yq1)
    _set_label(crossings, q2, xq2)
    # compass positions: X left of the bigon, Y right of it
    xn, xe, xs, xw = edge1, s2mid, s1low, xq2
    yn, ye, ys, yw = yq1, edge2, s1low, s2mid
    if over == 1:
        crossings.append([xw, xs, xe, xn])
        crossings.append([yw, ys, ye, yn])
    elif over == 2:
        crossings.append([xn, xw, xs, xe])
        crossings.append([yn, yw, ys, ye])
    else:
        raise ValueError("over must be 1 or 2")
    out = PDCode(tuple(tuple(x) for x in crossings))
    check = ClosedDiagram(out)
    if check.genus != diagram.genus or check.num_faces != diagram.num_faces + 2:
        raise DiagramError("R2 insertion did not produce a bigon (internal error)")
    return out


def connected_sum(pd1: PDCode, edge1: int, pd2: PDCode, edge2: int) -> PDCode:
    """Splice ``pd1`` and ``pd2`` by cutting ``edge1`` and ``edge2``."""
    offset = _fresh(pd1)
    shifted = relabel(pd2, {lab: lab + offset for lab in pd2.labels()})
    e2 = edge2 + offset
    occ1 = _occurrences(pd1, edge1)
    occ2 = _occurrences(shifted, e2)
    if len(occ1) != 2 or len(occ2) != 2:
        raise DiagramError("edge not found for connected sum")
    g = _fresh(shifted)
    c1 = [list(x) for x in pd1.crossings]
    c2 = [list(x) for x in shifted.crossings]
    c1[occ1[1][0]][occ1[1][1]] = g
    c2[occ2[0][0]][occ2[0][1]] = g
    c2[occ2[1][0]][occ2[1][1]] = edge1
    out = PDCode(tuple(tuple(x) for x in c1 + c2))
    if ClosedDiagram(out).genus != 0:
        raise DiagramError("connected sum is not planar (internal error)")
    return out


def random_r2(pd: PDCode, rng: random.Random) -> PDCode:
    """Apply an R2 move on a random face between two random edges of it."""
    diagram = ClosedDiagram(pd)
    faces = [f for f in range(diagram.num_faces) if len({lab for lab, _ in diagram.face_edges(f)}) >= 2]
    f = rng.choice(faces)
    labels = sorted({lab for lab, _ in diagram.face_edges(f)})
    e1, e2 = rng.sample(labels, 2)
    return insert_r2(pd, f, e1, e2, over=rng.choice((1, 2)))


# ---------------------------------------------------------------------------
# canonical forms


def _canonical_code(rotations, kinds, root_vertex, root_offset, offsets_for) -> tuple:
    order = [root_vertex]
    offset = {root_vertex: root_offset}
    occ: dict = {}
    for v, rot in enumerate(rotations):
        for i, lab in enumerate(rot):
            occ.setdefault(lab, []).append((v, i))
    alpha = {}
    for hs in occ.values():
        alpha[hs[0]], alpha[hs[1]] = hs[1], hs[0]
    k = 0
    while k < len(order):
        v = order[k]
        deg = len(rotations[v])
        for t in range(deg):
            w, j = alpha[(v, (offset[v] + t) % deg)]
            if w not in offset:
                offset[w] = offsets_for(w, j)
                order.append(w)
        k += 1
    if len(order) != len(rotations):
        return None
    number = {v: n for n, v in enumerate(order)}
    code = []
    for v in order:
        deg = len(rotations[v])
        row = [kinds[v]]
        for t in range(deg):
            w, j = alpha[(v, (offset[v] + t) % deg)]
            row.append((number[w], (j - offset[w]) % len(rotations[w])))
        code.append(tuple(row))
    return tuple(code)


def canonical_code(obj) -> tuple:
    """A relabeling-invariant code; equal codes mean isomorphic diagrams."""
    if isinstance(obj, PDCode):
        obj = ClosedDiagram(obj)
    if isinstance(obj, ClosedDiagram):
        if obj.is_unknot():
            return ("unknot",)
        rot = obj.rotations
        kinds = ["X"] * len(rot)

        def offs(w, j):
            return j - (j % 2)

        return min(
            _canonical_code(rot, kinds, v, s, offs) for v in range(len(rot)) for s in (0, 2)
        )
    piece: Piece = obj
    rot, kinds = piece.rotations, piece.kinds
    hole_v = piece.upper_vertex if piece.upper_vertex is not None else piece.lower_vertex

    def offs(w, j):
        if kinds[w] == "X":
            return j - (j % 2)
        return 0  # the hole vertex rotation starts at the marked point

    return _canonical_code(rot, kinds, hole_v, 0, offs)


# ---------------------------------------------------------------------------
# pieces


class _UnionFind:
    def __init__(self) -> None:
        self.parent: dict = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


class Piece:
    """A tangle in a sphere with one upper and/or one lower hole.

    ``upper`` and ``lower`` list hole endpoints (edge labels) from the marked
    point in induced boundary order.  ``arcs`` are crossing-free strands
    fusing two labels into one edge.
    """

    def __init__(
        self,
        crossings: Iterable[Sequence],
        upper: Optional[Sequence] = None,
        lower: Optional[Sequence] = None,
        arcs: Iterable[tuple] = (),
    ) -> None:
        self.crossings = tuple(tuple(x) for x in crossings)
        self.upper = tuple(upper) if upper is not None else None
        self.lower = tuple(lower) if lower is not None else None
        self.arcs = tuple(tuple(a) for a in arcs)
        for x in self.crossings:
            if len(x) != 4:
                raise DiagramError(f"crossing {x} does not have 4 slots")
        if self.upper is None and self.lower is None:
            raise DiagramError("a piece needs at least one hole")
        for name, hole in (("upper", self.upper), ("lower", self.lower)):
            if hole is not None and not hole:
                raise DiagramError(f"{name} hole has no endpoints")

        raw = Counter(lab for x in self.crossings for lab in x)
        raw.update(self.upper or ())
        raw.update(self.lower or ())
        uf = _UnionFind()
        arc_uses = Counter()
        for a, b in self.arcs:
            arc_uses[a] += 1
            arc_uses[b] += 1
            uf.union(a, b)
        for lab, c in arc_uses.items():
            if c + raw.get(lab, 0) != 2:
                raise DiagramError(f"arc label {lab!r} must occur once outside its arc")
        for lab, c in raw.items():
            if c + arc_uses.get(lab, 0) != 2:
                raise DiagramError(f"edge label {lab!r} occurs {c + arc_uses.get(lab, 0)} times")
        find = uf.find
        rotations = [tuple(find(lab) for lab in x) for x in self.crossings]
        kinds = ["X"] * len(rotations)
        self.upper_vertex = self.lower_vertex = None
        if self.upper is not None:
            self.upper_vertex = len(rotations)
            rotations.append(tuple(find(lab) for lab in reversed(self.upper)))
            kinds.append("U")
        if self.lower is not None:
            self.lower_vertex = len(rotations)
            rotations.append(tuple(find(lab) for lab in reversed(self.lower)))
            kinds.append("L")
        counts = Counter(lab for rot in rotations for lab in rot)
        loose = [lab for lab, c in counts.items() if c != 2]
        if loose:
            raise DiagramError(f"strand labels {loose} do not close up into edges")
        self.rotations = tuple(rotations)
        self.kinds = tuple(kinds)
        alpha, orbits, face_of = _trace(self.rotations)
        self._alpha, self._face_of = alpha, face_of
        V, E, F = len(rotations), sum(len(r) for r in rotations) // 2, len(orbits)
        if not _connected(self.rotations, alpha):
            raise DiagramError("piece is disconnected (split components are not supported)")
        if V - E + F != 2:
            raise DiagramError(f"piece is not planar: V-E+F = {V - E + F}")
        self.orbits = tuple(tuple(o) for o in orbits)
        ncross = len(self.crossings)
        self.corner_faces = _corner_faces(self.rotations, face_of, ncross)
        corners: dict = {f: [] for f in range(F)}
        arcs_met = Counter()
        for v, rot in enumerate(self.rotations):
            for gap in range(len(rot)):
                f = face_of[(v, (gap + 1) % len(rot))]
                corners[f].append((v, gap))
                if v >= ncross:
                    arcs_met[f] += 1
        self.faces = tuple(FaceInfo(f, tuple(corners[f]), arcs_met[f]) for f in range(F))
        self.adjacency = _adjacency(self.rotations, face_of)
        self.upper_arcs = self._hole_arcs(self.upper_vertex)
        self.lower_arcs = self._hole_arcs(self.lower_vertex)

    def _hole_arcs(self, hv) -> tuple[int, ...]:
        # arc k lies between endpoints k and k+1 of the listing (arc 0 holds the mark)
        if hv is None:
            return ()
        n = len(self.rotations[hv])
        return tuple(self._face_of[(hv, (n - k) % n)] for k in range(n))

    @property
    def num_faces(self) -> int:
        return len(self.faces)

    @property
    def num_crossings(self) -> int:
        return len(self.crossings)

    @property
    def n_upper(self) -> int:
        return len(self.upper) if self.upper is not None else 0

    @property
    def n_lower(self) -> int:
        return len(self.lower) if self.lower is not None else 0

    def crossing_corners(self, v: int) -> tuple[int, int, int, int]:
        g = self.corner_faces[v]
        return (g[2], g[3], g[0], g[1])

    def to_text(self) -> str:
        lines = []
        if self.upper is not None:
            lines.append("upper: %d <%s>" % (len(self.upper), " ".join(map(str, self.upper))))
        if self.lower is not None:
            lines.append("lower: %d <%s>" % (len(self.lower), " ".join(map(str, self.lower))))
        if self.crossings:
            lines.append(" ".join("X[%s]" % ",".join(map(str, x)) for x in self.crossings))
        for a, b in self.arcs:
            lines.append(f"arc: {a} {b}")
        return "\n".join(lines) + "\n"

    def __repr__(self) -> str:
        return f"Piece(crossings={len(self.crossings)}, upper={self.n_upper}, lower={self.n_lower})"


_HOLE_RE = re.compile(r"^\s*(upper|lower)\s*:\s*(\d+)\s*<?([^>]*)>?\s*$")
_ARC_RE = re.compile(r"arc\s*:\s*(\S+)\s+(\S+)")


def _label(tok: str):
    tok = tok.strip()
    try:
        return int(tok)
    except ValueError:
        raise PDParseError(f"bad label {tok!r}") from None


def parse_piece(text: str) -> Piece:
    """Parse the piece format::

        upper: 2 <1 2>
        lower: 2 <5 6>
        X[1,5,6,2]
        arc: 3 4
    """
    holes: dict = {}
    crossings: list = []
    arcs: list = []
    for lineno, line in enumerate(_strip_comments(text).splitlines(), start=1):
        if not line.strip():
            continue
        m = _HOLE_RE.match(line)
        if m:
            kind, count, rest = m.group(1), int(m.group(2)), m.group(3)
            labels = [_label(t) for t in rest.split()]
            if kind in holes:
                raise PDParseError(f"line {lineno}: duplicate {kind} hole")
            if len(labels) != count:
                raise PDParseError(f"line {lineno}: {kind} hole lists {len(labels)} endpoints, expected {count}")
            holes[kind] = labels
            continue
        rest = line
        for am in _ARC_RE.finditer(line):
            arcs.append((_label(am.group(1)), _label(am.group(2))))
        rest = _ARC_RE.sub(" ", rest)
        found = _X_RE.findall(rest)
        for body in found:
            labs = [_label(t) for t in body.split(",")]
            if len(labs) != 4:
                raise PDParseError(f"line {lineno}: X[{body}] has {len(labs)} labels")
            crossings.append(tuple(labs))
        if _X_RE.sub(" ", rest).strip(" \t,"):
            raise PDParseError(f"line {lineno}: cannot parse {line.strip()!r}")
    return Piece(crossings, holes.get("upper"), holes.get("lower"), arcs)


def _resolved(piece: Piece, tag: str):
    """Crossings and holes with arcs fused, labels tagged to avoid clashes."""
    uf = _UnionFind()
    for a, b in piece.arcs:
        uf.union(a, b)
    f = lambda lab: (tag, uf.find(lab))  # noqa: E731
    cr = [tuple(f(lab) for lab in x) for x in piece.crossings]
    up = [f(lab) for lab in piece.upper] if piece.upper is not None else None
    lo = [f(lab) for lab in piece.lower] if piece.lower is not None else None
    return cr, up, lo


def compose_pieces(upper: Piece, lower: Piece):
    """Glue the lower hole of ``upper`` to the upper hole of ``lower``.

    Endpoint ``i`` of one hole meets endpoint ``n+1-i`` of the other.  Returns
    a :class:`Piece`, or a :class:`ClosedDiagram` when no hole is left.
    """
    if upper.lower is None or lower.upper is None:
        raise DiagramError("upper piece needs a lower hole and lower piece an upper hole")
    n = len(upper.lower)
    if len(lower.upper) != n:
        raise DiagramError(f"endpoint count mismatch: {n} vs {len(lower.upper)}")
    cu, uu, ul = _resolved(upper, "a")
    cl, lu, ll = _resolved(lower, "b")
    uf = _UnionFind()
    for i in range(n):
        uf.union(ul[i], lu[n - 1 - i])
    crossings = [tuple(uf.find(lab) for lab in x) for x in cu + cl]
    new_upper = [uf.find(lab) for lab in uu] if uu is not None else None
    new_lower = [uf.find(lab) for lab in ll] if ll is not None else None
    used = Counter(lab for x in crossings for lab in x)
    used.update(new_upper or ())
    used.update(new_lower or ())
    glued = {uf.find(lab) for lab in ul}
    if any(used[lab] == 0 for lab in glued):
        raise DiagramError(
            "composition closes a crossing-free circle; re-encode it with an R2 pair"
        )
    numbering: dict = {}
    seq = [lab for x in crossings for lab in x] + (new_upper or []) + (new_lower or [])
    for lab in seq:
        numbering.setdefault(lab, len(numbering) + 1)
    crossings = [tuple(numbering[lab] for lab in x) for x in crossings]
    if new_upper is None and new_lower is None:
        return ClosedDiagram(PDCode(tuple(crossings)))
    up = [numbering[lab] for lab in new_upper] if new_upper is not None else None
    lo = [numbering[lab] for lab in new_lower] if new_lower is not None else None
    return Piece(crossings, up, lo)


def identity_piece(n: int, start: int = 1) -> Piece:
    """``n`` parallel strands; upper endpoint ``i`` runs to lower endpoint ``n+1-i``."""
    upper = list(range(start, start + n))
    lower = list(range(start + n, start + 2 * n))
    arcs = [(upper[i], lower[n - 1 - i]) for i in range(n)]
    return Piece([], upper, lower, arcs)
