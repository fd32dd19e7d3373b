import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from uinvariant.cyclotomic import ONE, S, SqrtExt, Y, ZERO
from uinvariant.diagram import (
    UNKNOT, ClosedDiagram, compose_pieces, identity_piece, parse_pd, parse_piece,
)
from uinvariant.engine import (
    StateError, Theory, corner_symbols, eval_closed, eval_matrix, eval_partial,
    evaluate_stack, face_contribution, fourj_value, matrix_compose, substates,
)
from uinvariant.slicing import slice_diagram
from uinvariant.uinv import BLACK, U_THEORY, WHITE

SMALL = [
    "X[1,1,2,2]",
    "X[1,2,2,1]",
    "X[1,5,2,4] X[3,1,4,6] X[5,3,6,2]",
    "X[4,2,5,1] X[8,6,1,5] X[6,3,7,4] X[2,7,3,8]",
    "X[4,1,3,2] X[2,3,1,4]",
    "X[1,2,1,2]",  # torus
]


def brute_force(d, theory, partial=None):
    """Naive sum over all |symbols|^F assignments."""
    partial = partial or {}
    total = theory.zero
    for state in itertools.product(range(theory.nsym), repeat=d.num_faces):
        if any(state[f] != s for f, s in partial.items()):
            continue
        if any((state[f], state[g]) in theory.forbidden for f, g in d.adjacency):
            continue
        w = theory.one
        for f in range(d.num_faces):
            if f not in partial:
                w = w * face_contribution(d, f, state[f], theory)
        for v in range(d.num_crossings):
            w = w * fourj_value(theory, *corner_symbols(d, state, v))
        total = total + w
    return total


def independent_sets(d) -> int:
    """Black face sets with no two adjacent faces (and no self-adjacent face)."""
    n = d.num_faces
    count = 0
    for mask in range(1 << n):
        ok = True
        for f, g in d.adjacency:
            if mask >> f & 1 and mask >> g & 1:
                ok = False
                break
        count += ok
    return count


COUNTING = Theory(
    name="count",
    symbols=("w", "b"),
    fourj={t: 1 for t in itertools.product(range(2), repeat=4)},
    forbidden=frozenset({(1, 1)}),
    face_value=(1, 1),
    face_value_inv=(1, 1),
)


def test_corner_reading():
    d = ClosedDiagram(parse_pd(SMALL[2]))
    assert corner_symbols(d, [0] * d.F, 0) == (0, 0, 0, 0)
    curl = ClosedDiagram(parse_pd("X[1,1,2,2]"))
    e, n, w, s = curl.crossing_corners(0)
    # loops at slots 0,1 and 2,3 bound the west and east corners
    assert n == s and len({e, w, n}) == 3
    e, n, w, s = ClosedDiagram(parse_pd("X[1,2,2,1]")).crossing_corners(0)
    assert e == w and len({e, n, s}) == 3


def test_fourj_u_values():
    assert fourj_value(U_THEORY, 0, 0, 0, 0) == -(Y)
    assert fourj_value(U_THEORY, 1, 0, 1, 0) == ONE.__class__.power_of_u(4)
    assert fourj_value(U_THEORY, 0, 1, 0, 1) == ONE.__class__.power_of_u(1)
    assert fourj_value(U_THEORY, 1, 1, 0, 0) == ZERO


def test_fourj_rotation_symmetry():
    for (e, n, w, s), val in U_THEORY.fourj.items():
        assert U_THEORY.fourj.get((w, s, e, n), ZERO) == val


def test_every_symbol_has_a_partner():
    for i in range(U_THEORY.nsym):
        assert any(U_THEORY.allowed(i, j) for j in range(U_THEORY.nsym))


@pytest.mark.parametrize("text", SMALL)
def test_pruned_equals_brute_force(text):
    d = ClosedDiagram(parse_pd(text))
    assert eval_closed(d, U_THEORY) == brute_force(d, U_THEORY)


def test_pruned_equals_brute_force_on_table(table):
    for r in table[::8]:
        d = ClosedDiagram(r.pd)
        assert eval_closed(d, U_THEORY) == brute_force(d, U_THEORY), r.name


def test_state_count_is_independent_sets(table, links):
    for r in table[::5] + links:
        d = ClosedDiagram(r.pd)
        assert eval_closed(d, COUNTING) == independent_sets(d), r.name


def test_unknot_value():
    assert eval_closed(UNKNOT, U_THEORY) == ONE + Y + Y


def test_zero_theory():
    zero = Theory("zero", ("w", "b"), {}, frozenset({(1, 1)}), (1, 1), (1, 1))
    for text in SMALL:
        assert eval_closed(ClosedDiagram(parse_pd(text)), zero) == 0


@st.composite
def int_theories(draw):
    nsym = draw(st.integers(2, 3))
    vals = st.integers(-3, 3)
    fourj = {}
    for t in itertools.product(range(nsym), repeat=4):
        rot = (t[2], t[3], t[0], t[1])
        if rot in fourj:
            fourj[t] = fourj[rot]
        else:
            fourj[t] = draw(vals)
    pairs = [(i, j) for i in range(nsym) for j in range(i, nsym)]
    forbidden = draw(st.sets(st.sampled_from(pairs), max_size=2))
    face = tuple(draw(vals) for _ in range(nsym))
    return Theory("rand", tuple(range(nsym)), fourj, frozenset(forbidden), face, face)


@settings(max_examples=30, suppress_health_check=[HealthCheck.too_slow], deadline=None)
@given(int_theories(), st.sampled_from(SMALL[:5]))
def test_generic_theory_matches_brute_force(theory, text):
    d = ClosedDiagram(parse_pd(text))
    assert eval_closed(d, theory) == brute_force(d, theory)


def test_parallel_matches_sequential(table):
    for r in table[-3:]:
        d = ClosedDiagram(r.pd)
        seq = eval_closed(d, U_THEORY)
        assert eval_closed(d, U_THEORY, parallel=2) == seq
        assert eval_closed(d, U_THEORY, parallel=3) == seq


# ----------------------------------------------------------------- partial


def test_partial_unknot():
    assert eval_partial(UNKNOT, U_THEORY, {0: "black"}) == ONE
    assert eval_partial(UNKNOT, U_THEORY, {1: BLACK}) == ONE
    assert eval_partial(UNKNOT, U_THEORY, {}) == eval_closed(UNKNOT, U_THEORY)


def test_partial_inconsistent_is_zero():
    d = ClosedDiagram(parse_pd(SMALL[2]))
    assert eval_partial(d, U_THEORY, [(0, "black"), (0, "white")]) == ZERO


def test_partial_full_assignment_is_product_of_fourj():
    d = ClosedDiagram(parse_pd(SMALL[2]))
    state = [WHITE] * d.F
    expected = ONE
    for v in range(d.V):
        expected = expected * fourj_value(U_THEORY, *corner_symbols(d, state, v))
    assert eval_partial(d, U_THEORY, dict(enumerate(state))) == expected


@pytest.mark.parametrize("text", SMALL[:5])
def test_partial_matches_brute_force(text):
    d = ClosedDiagram(parse_pd(text))
    for f in range(d.F):
        for s in (WHITE, BLACK):
            assert eval_partial(d, U_THEORY, {f: s}) == brute_force(d, U_THEORY, {f: s})


def test_partial_errors():
    d = ClosedDiagram(parse_pd(SMALL[2]))
    with pytest.raises(StateError):
        eval_partial(d, U_THEORY, {99: "black"})
    with pytest.raises(StateError):
        eval_partial(d, U_THEORY, {0: "green"})


# ----------------------------------------------------------------- matrices


def test_substates():
    assert substates(0, U_THEORY) == ((),)
    assert substates(1, U_THEORY) == ((0,),)
    assert substates(2, U_THEORY) == ((0, 0), (0, 1), (1, 0))
    assert len(substates(4, U_THEORY)) == 7  # Lucas number L_4


def test_cap_matrix():
    m = eval_matrix(parse_piece("upper: 2 <1 2>\narc: 1 2"), U_THEORY)
    assert m.shape == (1, 3)
    assert m.entries[0] == [SqrtExt(ONE), S, S]


def test_closed_piece_free_matrix_shapes():
    cups = parse_piece("lower: 4 <1 2 3 4>\narc: 1 2\narc: 3 4")
    assert eval_matrix(cups, U_THEORY).shape == (7, 1)


def test_identity_matrices():
    for n in (1, 2, 3, 4):
        m = eval_matrix(identity_piece(n), U_THEORY)
        k = len(substates(n, U_THEORY))
        assert m.shape == (k, k)
        nonzero = [(i, j) for i in range(k) for j in range(k) if m.entries[i][j]]
        # one nonzero entry per row, each equal to 1
        assert len(nonzero) == k and all(m.entries[i][j] == ONE for i, j in nonzero)
    assert eval_matrix(identity_piece(1), U_THEORY).entries == [[ONE]]


def test_identity_composition_is_neutral():
    x = parse_piece("upper: 4 <1 2 3 4>\nlower: 4 <5 6 7 8>\nX[6,7,2,3]\narc: 4 5\narc: 1 8\n")
    mx = eval_matrix(x, U_THEORY)
    mi = eval_matrix(identity_piece(4), U_THEORY)
    assert matrix_compose(mi, matrix_compose(mx, mi, U_THEORY), U_THEORY) == mx


def test_matrix_compose_mismatch():
    cap = eval_matrix(parse_piece("upper: 2 <1 2>\narc: 1 2"), U_THEORY)
    cups = eval_matrix(parse_piece("lower: 4 <1 2 3 4>\narc: 1 2\narc: 3 4"), U_THEORY)
    with pytest.raises(ValueError):
        matrix_compose(cups, cap, U_THEORY)


def _check_pairwise(pieces, theory):
    for a, b in zip(pieces, pieces[1:]):
        glued = compose_pieces(a, b)
        prod = matrix_compose(eval_matrix(a, theory), eval_matrix(b, theory), theory)
        if isinstance(glued, ClosedDiagram):
            assert prod.scalar() == eval_closed(glued, theory)
        else:
            assert eval_matrix(glued, theory) == prod


def test_composition_law_pairwise(table):
    rng = random.Random(11)
    for r in rng.sample(table, 12):
        pieces = slice_diagram(r.pd, seed=rng.randrange(1000))
        _check_pairwise(pieces, U_THEORY)


def test_stack_equals_closed(table, links):
    for r in table[::10] + links:
        m = evaluate_stack(slice_diagram(r.pd, seed=1), U_THEORY).scalar()
        assert m.is_cyclotomic()
        assert m == eval_closed(ClosedDiagram(r.pd), U_THEORY), r.name


@st.composite
def fraction_theories(draw):
    base = int_theories()
    t = draw(base)
    roots = tuple(Fraction(draw(st.integers(1, 3))) * draw(st.sampled_from([1, -1])) for _ in t.symbols)
    face = tuple(r * r for r in roots)
    return Theory("frac", t.symbols, {k: Fraction(v) for k, v in t.fourj.items()}, t.forbidden,
                  face, tuple(1 / x for x in face), Fraction(0), Fraction(1),
                  roots, tuple(1 / r for r in roots))


@settings(max_examples=25, suppress_health_check=[HealthCheck.too_slow], deadline=None)
@given(fraction_theories(), st.sampled_from(SMALL[2:5]), st.integers(0, 100))
def test_composition_law_generic(theory, text, seed):
    if any(all((i, j) in theory.forbidden for j in range(theory.nsym)) for i in range(theory.nsym)):
        return  # every symbol needs an allowed neighbour
    pd = parse_pd(text)
    pieces = slice_diagram(pd, seed=seed)
    assert evaluate_stack(pieces, theory).scalar() == eval_closed(ClosedDiagram(pd), theory)
    _check_pairwise(pieces, theory)


def test_theory_pickles():
    import pickle
    t = pickle.loads(pickle.dumps(U_THEORY))
    d = ClosedDiagram(parse_pd(SMALL[2]))
    assert eval_closed(d, t) == eval_closed(d, U_THEORY)


def test_enumeration_agrees_with_sweep(table):
    from uinvariant.engine import enumerate_states
    rng = random.Random(8)
    from uinvariant.diagram import random_r2
    for r in table[::30]:
        pd = random_r2(r.pd, rng)
        d = ClosedDiagram(pd)
        states = enumerate_states(d, U_THEORY)
        total = ZERO
        for _, w in states:
            total = total + w
        assert total == eval_closed(d, U_THEORY)
        assert eval_closed(d, U_THEORY, parallel=2) == total
        assert len(enumerate_states(d, COUNTING)) == eval_closed(d, COUNTING)
