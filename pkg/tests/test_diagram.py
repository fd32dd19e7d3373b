import random

import pytest

from uinvariant.diagram import (
    UNKNOT, ClosedDiagram, DiagramError, PDCode, PDParseError, Piece,
    build_map, canonical_code, components, compose_pieces, connected_sum,
    identity_piece, insert_curl, insert_r2, mirror, parse_pd, parse_piece,
    random_r2, relabel, self_writhe,
)

TREFOIL = "X[1,5,2,4] X[3,1,4,6] X[5,3,6,2]"


def test_parse_roundtrip():
    pd = parse_pd(TREFOIL)
    assert str(pd) == TREFOIL
    assert parse_pd(str(pd)) == pd
    assert parse_pd("# comment\nX[1,5,2,4],X[3,1,4,6]\nX[5,3,6,2]  # tail") == pd


@pytest.mark.parametrize("text", ["", "X[1,2,3]", "X[1,2,a,4]", "Y[1,2,3,4]", "X[0,1,1,0]", "hello"])
def test_parse_errors(text):
    with pytest.raises(PDParseError):
        parse_pd(text)


def test_multiplicity_is_validation_error():
    with pytest.raises(DiagramError) as info:
        parse_pd("X[1,2,3,4]")
    assert not isinstance(info.value, PDParseError)
    assert "exactly twice" in str(info.value)


def test_trefoil_map():
    d = build_map(parse_pd(TREFOIL))
    assert (d.V, d.E, d.F, d.genus) == (3, 6, 5, 0)
    # two triangles and three bigons, and no face meets itself
    assert sorted(len(f.corners) for f in d.faces) == [2, 2, 2, 3, 3]
    assert all(f != g for f, g in d.adjacency)
    assert len(components(d)) == 1


def test_table_is_planar(table):
    for r in table:
        d = ClosedDiagram(r.pd)
        assert d.genus == 0
        assert d.F == len(r.pd) + 2
        assert len(components(d)) == 1
        assert sum(len(f.corners) for f in d.faces) == 4 * d.V


def test_links(links):
    counts = {r.name: len(components(ClosedDiagram(r.pd))) for r in links}
    assert counts["L2a1"] == 2
    assert counts["L6a4"] == 3


def test_torus_diagram():
    d = build_map(parse_pd("X[1,2,1,2]"))
    assert d.genus == 1 and d.F == 1
    assert (0, 0) in d.adjacency


def test_split_diagram_rejected():
    with pytest.raises(DiagramError):
        build_map(parse_pd("X[1,1,2,2] X[3,3,4,4]"))


def test_curl_signs():
    assert self_writhe(build_map(parse_pd("X[1,1,2,2]"))) == 1
    assert self_writhe(build_map(parse_pd("X[1,2,2,1]"))) == -1
    pd = parse_pd(TREFOIL)
    base = self_writhe(build_map(pd))
    for edge in range(1, 7):
        for sign in (1, -1):
            q = insert_curl(pd, edge, sign)
            d = build_map(q)
            assert d.genus == 0 and d.F == 6
            assert self_writhe(d) == base + sign


def test_trefoil_writhe_and_mirror(table_by_name):
    pd = parse_pd(TREFOIL)
    assert abs(self_writhe(build_map(pd))) == 3
    for r in table_by_name.values():
        w = self_writhe(ClosedDiagram(r.pd))
        assert self_writhe(ClosedDiagram(mirror(r.pd))) == -w
        assert mirror(mirror(r.pd)) == r.pd


def test_linking_crossings_not_in_self_writhe(links):
    hopf = next(r for r in links if r.name == "L2a1")
    assert self_writhe(ClosedDiagram(hopf.pd)) == 0


def test_r2_adds_bigon(table):
    rng = random.Random(7)
    for r in table[:60]:
        pd = r.pd
        before = ClosedDiagram(pd)
        after = ClosedDiagram(random_r2(pd, rng))
        assert after.F == before.F + 2 and after.genus == 0
        assert self_writhe(after) == self_writhe(before)


def test_r2_both_overpasses():
    pd = parse_pd(TREFOIL)
    d = build_map(pd)
    f = max(range(d.F), key=lambda f: len(d.faces[f].corners))
    labels = sorted({lab for lab, _ in d.face_edges(f)})
    for over in (1, 2):
        q = insert_r2(pd, f, labels[0], labels[1], over=over)
        assert len(q) == 5
    with pytest.raises(DiagramError):
        insert_r2(pd, f, labels[0], labels[0])


def test_connected_sum(table):
    a, b = table[0].pd, table[1].pd
    s = connected_sum(a, 1, b, 3)
    d = ClosedDiagram(s)
    assert d.genus == 0 and d.V == len(a) + len(b)
    assert len(components(d)) == 1


def test_canonical_code_relabel_invariant(table):
    rng = random.Random(3)
    for r in table[:40]:
        labels = r.pd.labels()
        perm = labels[:]
        rng.shuffle(perm)
        q = relabel(r.pd, dict(zip(labels, [p + 100 for p in perm])))
        crossings = list(q.crossings)
        rng.shuffle(crossings)
        # rotating a crossing by two slots keeps under and over strands
        crossings = [x[2:] + x[:2] if rng.random() < 0.5 else x for x in crossings]
        q = PDCode(tuple(crossings))
        assert canonical_code(q) == canonical_code(r.pd)
    assert canonical_code(table[0].pd) != canonical_code(table[1].pd)


def test_canonical_code_sees_mirror():
    pd = parse_pd(TREFOIL)
    assert canonical_code(pd) != canonical_code(mirror(pd))


# ----------------------------------------------------------------- pieces

CAP = "upper: 2 <1 2>\narc: 1 2\n"


def test_parse_piece():
    p = parse_piece(CAP)
    assert p.upper == (1, 2) and p.lower is None and p.crossings == ()
    assert p.num_faces == 2
    assert [f.boundary_arcs for f in p.faces] == [1, 1]
    assert parse_piece(p.to_text()).to_text() == p.to_text()


def test_piece_with_crossing():
    p = parse_piece("upper: 4 <1 2 3 4>\nlower: 4 <5 6 7 8>\nX[6,7,2,3]\narc: 4 5\narc: 1 8\n")
    assert p.num_faces == 5
    assert len(p.upper_arcs) == 4 and len(p.lower_arcs) == 4


@pytest.mark.parametrize("text", [
    "upper: 3 <1 2>\narc: 1 2",
    "upper: 2 <1 2>\nfoo",
    "X[1,2,3,4]\nupper: 2 <1 x>",
])
def test_piece_parse_errors(text):
    with pytest.raises(PDParseError):
        parse_piece(text)


@pytest.mark.parametrize("text", [
    "X[1,1,2,2]",                       # no hole
    "upper: 2 <1 2>",                   # dangling endpoints
    "upper: 2 <1 2>\narc: 1 2\narc: 1 2",
    "upper: 4 <1 2 3 4>\narc: 1 3\narc: 2 4",  # crossing arcs are not planar
])
def test_piece_validation_errors(text):
    with pytest.raises(DiagramError):
        parse_piece(text)


def test_identity_piece():
    for n in range(1, 6):
        p = identity_piece(n)
        assert p.num_faces == n
        assert all(f.boundary_arcs == 2 for f in p.faces)


def test_compose_identity_is_isomorphism():
    p = parse_piece("upper: 4 <1 2 3 4>\nlower: 4 <5 6 7 8>\nX[6,7,2,3]\narc: 4 5\narc: 1 8\n")
    assert canonical_code(compose_pieces(identity_piece(4), p)) == canonical_code(p)
    assert canonical_code(compose_pieces(p, identity_piece(4))) == canonical_code(p)


def test_compose_associative():
    cups = parse_piece("lower: 4 <1 2 3 4>\narc: 1 2\narc: 3 4")
    x = parse_piece("upper: 4 <1 2 3 4>\nlower: 4 <5 6 7 8>\nX[6,7,2,3]\narc: 4 5\narc: 1 8\n")
    y = parse_piece("upper: 4 <1 2 3 4>\nlower: 4 <5 6 7 8>\nX[5,6,3,4]\narc: 2 7\narc: 1 8\n")
    left = compose_pieces(compose_pieces(cups, x), y)
    right = compose_pieces(cups, compose_pieces(x, y))
    assert canonical_code(left) == canonical_code(right)


def test_compose_closes_knot():
    cups = parse_piece("lower: 4 <1 2 3 4>\narc: 1 2\narc: 3 4")
    x = parse_piece("upper: 4 <1 2 3 4>\nlower: 4 <5 6 7 8>\nX[6,7,2,3]\narc: 4 5\narc: 1 8\n")
    caps = parse_piece("upper: 4 <1 2 3 4>\narc: 4 3\narc: 2 1")
    acc = cups
    for p in (x, x, x, caps):
        acc = compose_pieces(acc, p)
    assert isinstance(acc, ClosedDiagram)
    assert acc.genus == 0 and acc.V == 3 and abs(self_writhe(acc)) == 3


def test_compose_errors():
    cap = parse_piece(CAP)
    cup = parse_piece("lower: 2 <1 2>\narc: 1 2")
    with pytest.raises(DiagramError):
        compose_pieces(cup, cap)  # closes a crossing-free circle
    with pytest.raises(DiagramError):
        compose_pieces(cap, cup)
    with pytest.raises(DiagramError):
        compose_pieces(identity_piece(3), cap)


def test_unknot():
    assert UNKNOT.F == 2 and UNKNOT.genus == 0
    assert self_writhe(UNKNOT) == 0
    with pytest.raises(DiagramError):
        PDCode(())
