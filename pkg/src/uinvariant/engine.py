"""Facial state sums over closed diagrams and tangle pieces.

A state assigns a symbol to every face.  Its weight is the product of the
4j values at crossings, read from the four corner faces, times a facial
factor ``x_s ** (1 - p_f/2)`` per face, where ``p_f`` counts the hole arcs on
the face (zero in a closed diagram).  States in which two adjacent faces
carry a forbidden pair (a face may be adjacent to itself) are skipped.

Sums run as a sweep over faces in a fixed order that keeps, per step, only
the assignment of faces that still matter (an unassigned neighbour or an
open crossing).  Explicit states come from a depth-first search over the
same order.

Ring elements only need ``+`` and ``*``; a :class:`Theory` supplies its own
zero and one, so plain integers work for test theories.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Optional, Sequence

from .diagram import ClosedDiagram, DiagramError, Piece

__all__ = [
    "Theory",
    "TangleMatrix",
    "StateError",
    "eval_closed",
    "eval_partial",
    "eval_matrix",
    "matrix_compose",
    "evaluate_stack",
    "substates",
    "corner_symbols",
    "fourj_value",
    "face_contribution",
    "enumerate_states",
]


class StateError(ValueError):
    """A partial assignment is invalid for the diagram."""


@dataclass(frozen=True)
class Theory:
    """Gluing data for a facial state sum.

    ``fourj`` maps an (east, north, west, south) tuple of symbol indices to a
    value; missing keys are zero.  ``face_root[s]`` is a square root of the
    facial value ``x_s`` and ``face_root_inv[s]`` its inverse; only integer
    powers of ``x_s`` are needed for closed diagrams.
    """

    name: str
    symbols: tuple
    fourj: Mapping
    forbidden: frozenset
    face_value: tuple
    face_value_inv: tuple
    zero: Any = 0
    one: Any = 1
    face_root: Optional[tuple] = None
    face_root_inv: Optional[tuple] = None
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self) -> None:
        # forbidden pairs are unordered
        pairs = set()
        for pair in self.forbidden:
            a, b = tuple(pair) if len(pair) == 2 else (tuple(pair)[0],) * 2
            pairs.add((a, b))
            pairs.add((b, a))
        object.__setattr__(self, "forbidden", frozenset(pairs))

    @property
    def nsym(self) -> int:
        return len(self.symbols)

    def symbol_index(self, s) -> int:
        if isinstance(s, int) and 0 <= s < len(self.symbols):
            return s
        try:
            return self.symbols.index(s)
        except ValueError:
            raise StateError(f"unknown symbol {s!r}; expected one of {self.symbols}") from None

    def allowed(self, s: int, t: int) -> bool:
        return (s, t) not in self.forbidden

    def facial(self, s: int, twice_exp: int):
        """``x_s ** (twice_exp / 2)``."""
        key = (s, twice_exp)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        if twice_exp % 2 == 0:
            base = self.face_value[s] if twice_exp >= 0 else self.face_value_inv[s]
            k = abs(twice_exp) // 2
            if base is None:
                raise ValueError(f"facial value of symbol {self.symbols[s]!r} is not invertible")
        else:
            if self.face_root is None:
                raise ValueError(f"theory {self.name} has no facial square roots")
            base = self.face_root[s] if twice_exp >= 0 else self.face_root_inv[s]
            k = abs(twice_exp)
            if base is None:
                raise ValueError(f"facial root of symbol {self.symbols[s]!r} is not invertible")
        val = self.one
        for _ in range(k):
            val = val * base
        if val == self.one:
            val = self.one  # lets the search skip multiplications by one
        self._cache[key] = val
        return val

    def __getstate__(self):
        d = dict(self.__dict__)
        d["_cache"] = {}
        return d

    def __setstate__(self, d):
        for k, v in d.items():
            object.__setattr__(self, k, v)


def fourj_value(theory: Theory, east: int, north: int, west: int, south: int):
    return theory.fourj.get((east, north, west, south), theory.zero)


def corner_symbols(diagram, state: Sequence[int], v: int) -> tuple[int, int, int, int]:
    """Symbols (east, north, west, south) at crossing ``v`` under ``state``."""
    return tuple(state[f] for f in diagram.crossing_corners(v))


def face_contribution(diagram, f: int, symbol: int, theory: Theory):
    return theory.facial(symbol, diagram.faces[f].twice_exponent)


# ---------------------------------------------------------------------------
# search plan


@dataclass(frozen=True)
class _Plan:
    order: tuple           # faces in assignment order
    twice_exp: tuple       # per position
    factor: tuple          # per position: apply facial factor?
    back: tuple            # per position: earlier positions adjacent (and self flag)
    self_adj: tuple        # per position
    closing: tuple         # per position: crossings completed there, as position 4-tuples
    fixed: tuple           # per position: forced symbol or None
    frontier: tuple = ()   # per position: positions still needed after that step


def _face_order(diagram) -> list[int]:
    """Highest degree first, then greedily the face touching most open crossings.

    Crossings close (and zero 4j values prune) as early as possible; any
    order gives the same sum.
    """
    F = diagram.num_faces
    deg = [len(face.corners) for face in diagram.faces]
    if F == 0:
        return []
    touching: list[set] = [set() for _ in range(F)]
    for v in range(diagram.num_crossings):
        for f in diagram.crossing_corners(v):
            touching[f].add(v)
    order = [min(range(F), key=lambda f: (-deg[f], f))]
    seen = {order[0]}
    started = set(touching[order[0]])
    while len(order) < F:
        f = min((g for g in range(F) if g not in seen),
                key=lambda g: (-len(touching[g] & started), -deg[g], g))
        order.append(f)
        seen.add(f)
        started |= touching[f]
    return order


def _make_plan(diagram, partial: Optional[Mapping[int, int]] = None, theory: Optional[Theory] = None) -> _Plan:
    F = diagram.num_faces
    partial = dict(partial or {})
    for f in partial:
        if not 0 <= f < F:
            raise StateError(f"face {f} out of range 0..{F - 1}")
    order = _face_order(diagram)
    pos = {f: i for i, f in enumerate(order)}
    adj_back: list[list[int]] = [[] for _ in range(F)]
    self_adj = [False] * F
    for f, g in diagram.adjacency:
        if f == g:
            self_adj[pos[f]] = True
            continue
        a, b = sorted((pos[f], pos[g]))
        adj_back[b].append(a)
    closing: list[list] = [[] for _ in range(F)]
    for v in range(diagram.num_crossings):
        corners = tuple(pos[f] for f in diagram.crossing_corners(v))
        closing[max(corners)].append(corners)
    fixed = [None] * F
    for f, s in partial.items():
        fixed[pos[f]] = theory.symbol_index(s) if theory is not None else s
    # a position stays on the frontier until its last neighbour or crossing is assigned
    last = list(range(F))
    for b, earlier in enumerate(adj_back):
        for a in earlier:
            last[a] = max(last[a], b)
    for i, cs in enumerate(closing):
        for c in cs:
            for a in c:
                last[a] = max(last[a], i)
    frontier = tuple(tuple(j for j in range(i + 1) if last[j] > i) for i in range(F))
    return _Plan(
        order=tuple(order),
        twice_exp=tuple(diagram.faces[f].twice_exponent for f in order),
        factor=tuple(fixed[i] is None for i in range(F)),
        back=tuple(tuple(sorted(b)) for b in adj_back),
        self_adj=tuple(self_adj),
        closing=tuple(tuple(c) for c in closing),
        fixed=tuple(fixed),
        frontier=frontier,
    )


def _choices(plan: _Plan, theory: Theory, i: int):
    if plan.fixed[i] is not None:
        return (plan.fixed[i],)
    return range(theory.nsym)


def _step_weight(plan: _Plan, theory: Theory, assign: list, i: int, s: int):
    """Weight gained by assigning symbol ``s`` at position ``i``, or None if pruned."""
    forbidden = theory.forbidden
    if plan.self_adj[i] and (s, s) in forbidden:
        return None
    for j in plan.back[i]:
        if (assign[j], s) in forbidden:
            return None
    one = theory.one
    w = theory.facial(s, plan.twice_exp[i]) if plan.factor[i] else one
    assign[i] = s
    fourj = theory.fourj
    for c in plan.closing[i]:
        val = fourj.get((assign[c[0]], assign[c[1]], assign[c[2]], assign[c[3]]))
        if val is None or not val:
            return None
        w = val if w is one else w * val
    return w


def _search(plan: _Plan, theory: Theory, assign: list, start: int, weight, visit=None):
    """Sum of weights over completions of ``assign[:start]``."""
    F = len(plan.order)
    if start == F:
        if visit is not None:
            visit(tuple(assign), weight)
        return weight
    total = theory.zero
    for s in _choices(plan, theory, start):
        w = _step_weight(plan, theory, assign, start, s)
        if w is None:
            continue
        nxt = weight if w is theory.one else (w if weight is theory.one else weight * w)
        total = total + _search(plan, theory, assign, start + 1, nxt, visit)
    return total


def _sweep(plan: _Plan, theory: Theory, assign: list, start: int, weight):
    """Same sum as :func:`_search`, merging partial states that agree on the frontier."""
    F = len(plan.order)
    if start == F:
        return weight
    prev = plan.frontier[start - 1] if start else ()
    layer = {tuple(assign[j] for j in prev): weight}
    scratch = [None] * F
    one = theory.one
    for i in range(start, F):
        keep = plan.frontier[i]
        nxt: dict = {}
        for key, wt in layer.items():
            for j, sym in zip(prev, key):
                scratch[j] = sym
            for sym in _choices(plan, theory, i):
                w = _step_weight(plan, theory, scratch, i, sym)
                if w is None:
                    continue
                w = wt if w is one else (w if wt is one else wt * w)
                k = tuple(scratch[j] for j in keep)
                old = nxt.get(k)
                nxt[k] = w if old is None else old + w
        layer, prev = nxt, keep
        if not layer:
            return theory.zero
    total = theory.zero
    for w in layer.values():
        total = total + w
    return total


def _prefixes(plan: _Plan, theory: Theory, depth: int):
    """Allowed assignments of the first ``depth`` positions with their weights."""
    out = []
    assign = [None] * len(plan.order)

    def rec(i, weight):
        if i == depth:
            out.append((tuple(assign[:depth]), weight))
            return
        for s in _choices(plan, theory, i):
            w = _step_weight(plan, theory, assign, i, s)
            if w is None:
                continue
            rec(i + 1, weight * w)

    rec(0, theory.one)
    return out


def _suffix_job(args):
    plan, theory, prefix, weight = args
    assign = list(prefix) + [None] * (len(plan.order) - len(prefix))
    return _sweep(plan, theory, assign, len(prefix), weight)


def _run(plan: _Plan, theory: Theory, parallel: Optional[int]):
    F = len(plan.order)
    if not parallel or parallel <= 1 or F < 4:
        return _sweep(plan, theory, [None] * F, 0, theory.one)
    depth = 1
    while depth < F - 2 and theory.nsym ** depth < 4 * parallel:
        depth += 1
    jobs = [(plan, theory, p, w) for p, w in _prefixes(plan, theory, depth)]
    total = theory.zero
    if not jobs:
        return total
    with ProcessPoolExecutor(max_workers=parallel) as pool:
        # map preserves the canonical prefix order, so the sum is deterministic
        for part in pool.map(_suffix_job, jobs, chunksize=max(1, len(jobs) // (4 * parallel))):
            total = total + part
    return total


def eval_closed(diagram: ClosedDiagram, theory: Theory, parallel: Optional[int] = None):
    """Raw state sum of a closed diagram."""
    if diagram.is_unknot():
        # a crossing-free circle: two adjacent faces, each with x_s
        total = theory.zero
        for s in range(theory.nsym):
            for t in range(theory.nsym):
                if theory.allowed(s, t):
                    total = total + theory.face_value[s] * theory.face_value[t]
        return total
    return _run(_make_plan(diagram, None, theory), theory, parallel)


def _normalize_partial(theory: Theory, assignment) -> Optional[dict]:
    """Dict face -> symbol index, or None when two symbols meet in one face."""
    items = assignment.items() if isinstance(assignment, Mapping) else assignment
    out: dict = {}
    for f, s in items:
        s = theory.symbol_index(s)
        if out.setdefault(f, s) != s:
            return None
    return out


def eval_partial(diagram, theory: Theory, assignment, parallel: Optional[int] = None):
    """State sum with some faces preassigned.

    ``assignment`` is a mapping or an iterable of (face, symbol) pairs; a face
    given two different symbols makes the partial state inconsistent and the
    value zero.  Preassigned faces contribute no facial factor; adjacency and
    4j values still apply to them.
    """
    partial = _normalize_partial(theory, assignment)
    if partial is None:
        return theory.zero
    if isinstance(diagram, ClosedDiagram) and diagram.is_unknot():
        for f in partial:
            if f not in (0, 1):
                raise StateError(f"face {f} out of range 0..1")
        total = theory.zero
        for s in range(theory.nsym):
            for t in range(theory.nsym):
                if partial.get(0, s) != s or partial.get(1, t) != t or not theory.allowed(s, t):
                    continue
                w = theory.one
                if 0 not in partial:
                    w = w * theory.face_value[s]
                if 1 not in partial:
                    w = w * theory.face_value[t]
                total = total + w
        return total
    plan = _make_plan(diagram, partial, theory)
    return _run(plan, theory, parallel)


def enumerate_states(diagram, theory: Theory, partial: Optional[Mapping[int, Any]] = None) -> list:
    """All allowed states with nonzero weight as (face-indexed symbols, weight)."""
    plan = _make_plan(diagram, partial, theory)
    found = []

    def visit(assign, weight):
        state = [None] * len(assign)
        for i, f in enumerate(plan.order):
            state[f] = assign[i]
        found.append((tuple(state), weight))

    _search(plan, theory, [None] * len(plan.order), 0, theory.one, visit)
    return found


# ---------------------------------------------------------------------------
# tangle matrices


def substates(n: int, theory: Theory) -> tuple[tuple[int, ...], ...]:
    """Symbol tuples for the ``n`` arcs of a hole, lexicographic.

    Cyclically consecutive arcs are separated by one endpoint edge, so they
    may not carry a forbidden pair; for ``n = 1`` the arc meets itself.
    """
    if n == 0:
        return ((),)
    out = []
    for t in itertools.product(range(theory.nsym), repeat=n):
        if all(theory.allowed(t[k], t[(k + 1) % n]) for k in range(n)):
            out.append(t)
    return tuple(out)


@dataclass
class TangleMatrix:
    """Rows are lower-hole substates, columns upper-hole substates."""

    rows: tuple
    cols: tuple
    entries: list
    theory_name: str = ""

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), len(self.cols))

    def entry(self, lower: tuple, upper: tuple):
        return self.entries[self.rows.index(tuple(lower))][self.cols.index(tuple(upper))]

    def scalar(self):
        if self.shape != (1, 1):
            raise ValueError(f"matrix of shape {self.shape} is not a scalar")
        return self.entries[0][0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, TangleMatrix):
            return NotImplemented
        return self.rows == other.rows and self.cols == other.cols and self.entries == other.entries

    def format(self, symbols: Sequence[str] = ()) -> str:
        def name(t):
            if not t:
                return "()"
            return "".join(symbols[s] if symbols else str(s) for s in t)

        lines = ["rows (lower): " + " ".join(name(r) for r in self.rows),
                 "cols (upper): " + " ".join(name(c) for c in self.cols)]
        for r, row in zip(self.rows, self.entries):
            lines.append(name(r) + ": " + "  ".join(str(x) for x in row))
        return "\n".join(lines)


def eval_matrix(piece: Piece, theory: Theory) -> TangleMatrix:
    """The tangle matrix of a piece, one full enumeration bucketed by substates."""
    rows = substates(piece.n_lower, theory)
    cols = substates(piece.n_upper, theory)
    ri = {r: i for i, r in enumerate(rows)}
    ci = {c: i for i, c in enumerate(cols)}
    entries = [[theory.zero for _ in cols] for _ in rows]
    upper_arcs, lower_arcs = piece.upper_arcs, piece.lower_arcs
    for state, weight in enumerate_states(piece, theory):
        lam = tuple(state[f] for f in lower_arcs)
        ups = tuple(state[f] for f in upper_arcs)
        i, j = ri.get(lam), ci.get(ups)
        if i is None or j is None:
            raise DiagramError("state restricts to a substate excluded by adjacency (internal error)")
        entries[i][j] = entries[i][j] + weight
    return TangleMatrix(rows, cols, entries, theory.name)


def _glue_index(n: int, upper_rows: tuple, lower_cols: tuple) -> list[int]:
    # arc k of one hole meets arc -k mod n of the other
    pos = {c: j for j, c in enumerate(lower_cols)}
    return [pos[tuple(lam[(-k) % n] for k in range(n))] for lam in upper_rows]


def matrix_compose(upper: TangleMatrix, lower: TangleMatrix, theory: Theory) -> TangleMatrix:
    """Matrix of ``compose_pieces(upper_piece, lower_piece)``."""
    if not upper.rows or not lower.cols:
        raise ValueError("empty matrix")
    n = len(upper.rows[0])
    if len(lower.cols[0]) != n or len(upper.rows) != len(lower.cols):
        raise ValueError("hole sizes do not match for composition")
    perm = _glue_index(n, upper.rows, lower.cols)
    # lower @ P @ upper, P sending upper's row k to lower's column perm[k]
    out = []
    for lrow in lower.entries:
        row = []
        for j in range(len(upper.cols)):
            acc = theory.zero
            for k, m in enumerate(perm):
                a = lrow[m]
                if not a:
                    continue
                b = upper.entries[k][j]
                if b:
                    acc = acc + a * b
            row.append(acc)
        out.append(row)
    return TangleMatrix(lower.rows, upper.cols, out, theory.name)


def evaluate_stack(pieces: Iterable[Piece], theory: Theory) -> TangleMatrix:
    """Compose matrices of pieces listed from top to bottom."""
    it = iter(pieces)
    try:
        acc = eval_matrix(next(it), theory)
    except StopIteration:
        raise ValueError("empty stack") from None
    for p in it:
        acc = matrix_compose(acc, eval_matrix(p, theory), theory)
    return acc
