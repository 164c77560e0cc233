import random

import pytest

from pseudolinks import (
    PseudoLinkError,
    canonical_diagram,
    canonical_form,
    mirror,
    parse_diagram,
    relabel,
    tree_gauge,
    validate,
)


def scrambled(d, rng):
    names = [c.id for c in d.crossings]
    pool = [f"k{i}" for i in rng.sample(range(100), len(names))]
    cmap = dict(zip(names, pool))
    eids = sorted(d.edge_darts)
    emap = dict(zip(eids, rng.sample(range(1, 200), len(eids))))
    rot = {}
    for c in d.crossings:
        rot[c.id] = rng.choice([0, 2]) if c.kind == "X" else rng.randrange(4)
    lmap = {l.id: f"Q{i}" for i, l in enumerate(d.loops)}
    return relabel(d, cmap, emap, rot, lmap)


@pytest.mark.parametrize("fixture_name", [
    "trefoil", "kink", "hopf", "pseudo_trefoil", "annular_pseudo_trefoil", "torus_clasp",
])
def test_relabel_invariance(fixture_name, request):
    d = request.getfixturevalue(fixture_name)
    want = canonical_form(d)
    rng = random.Random(11)
    for _ in range(12):
        d2 = scrambled(d, rng)
        assert validate(d2).ok == validate(d).ok
        assert canonical_form(d2) == want


def test_relabel_preserves_validity(annular_pseudo_trefoil):
    rng = random.Random(5)
    for _ in range(8):
        assert validate(scrambled(annular_pseudo_trefoil, rng)).ok


def test_relabel_rejects_odd_classical_rotation(trefoil):
    with pytest.raises(PseudoLinkError):
        relabel(
            trefoil,
            {c.id: c.id for c in trefoil.crossings},
            {e: e for e in trefoil.edge_darts},
            {"c1": 1},
        )


def test_canonical_idempotent(annular_pseudo_trefoil):
    cf = canonical_form(annular_pseudo_trefoil)
    assert canonical_form(canonical_diagram(annular_pseudo_trefoil)) == cf
    assert canonical_form(parse_diagram(cf)) == cf


def test_mirror_changes_form_and_is_involution(trefoil):
    m = mirror(trefoil)
    assert canonical_form(m) != canonical_form(trefoil)
    assert canonical_form(mirror(m)) == canonical_form(trefoil)


def test_prob_transport():
    # identical shadows whose stored rotations differ by an odd step must agree
    base = "surface planar; crossing P c1 (1,1,2,2); prob c1 1/3"
    d = parse_diagram(base)
    rng = random.Random(3)
    want = canonical_form(d)
    for _ in range(8):
        assert canonical_form(scrambled(d, rng)) == want


def test_gauge_zero_sums_invariant(annular_pseudo_trefoil, torus_clasp):
    for d in (annular_pseudo_trefoil, torus_clasp):
        g = tree_gauge(d)
        assert validate(g).ok
        assert sorted(map(str, (d.face_sum(f) for f in d.faces))) == sorted(
            map(str, (g.face_sum(f) for f in g.faces))
        )


def test_gauge_idempotent(annular_pseudo_trefoil):
    g = tree_gauge(annular_pseudo_trefoil)
    assert tree_gauge(g) == g


def test_pieces_sorted_deterministically():
    a = parse_diagram(
        "surface planar; crossing X c1 (1,1,2,2); crossing X z9 (3,3,4,4)"
    )
    b = parse_diagram(
        "surface planar; crossing X aa (3,3,4,4); crossing X b2 (1,1,2,2)"
    )
    assert canonical_form(a) == canonical_form(b)


def test_loops_normalized():
    a = parse_diagram("surface toroidal; loop Lx class=(-1,-2); loop Ly class=(1,2)")
    b = parse_diagram("surface toroidal; loop L1 class=(1,2); loop L2 class=(-1,-2)")
    assert canonical_form(a) == canonical_form(b)


def test_zero_winding_marks_are_pinned():
    # a null-winding kink in the annulus: the marks can sit in any face
    # without changing the link, so the canonical form must not see them
    a = parse_diagram(
        "surface annular; crossing X c1 (1,1,2,2); face inner c1.1; face outer c1.1"
    )
    b = parse_diagram(
        "surface annular; crossing X c1 (1,1,2,2); face inner c1.3; face outer c1.3"
    )
    assert validate(a).ok and validate(b).ok
    assert canonical_form(a) == canonical_form(b)


def test_winding_marks_are_data():
    wind = "surface annular; crossing X c1 (1,1,2,2); edge 1 w=1"
    a = parse_diagram(wind + "; face inner c1.0; face outer c1.1")
    assert validate(a).ok
    # winding diagrams keep their mark faces in the canonical text
    assert "face inner" in canonical_form(a)


def test_mark_dart_within_face_is_gauge():
    # same marked faces, different dart picked inside the inner face
    base = (
        "surface annular\n"
        "crossing X c1 (6,2,1,5)\ncrossing P c2 (2,4,3,1)\ncrossing P c3 (4,6,5,3)\n"
        "edge 5 w=1\nedge 6 w=1\n"
        "prob c2 1/2\nprob c3 1/2\n"
        "face outer c1.3\n"
    )
    a = parse_diagram(base + "face inner c1.1\n")
    b = parse_diagram(base + "face inner c2.0\n")
    assert validate(a).ok and validate(b).ok
    assert canonical_form(a) == canonical_form(b)
