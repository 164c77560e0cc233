"""State-sum invariants: hand-derived anchors plus naive-oracle checks.

The fixture trefoil has writhe +3 (checked by hand from crossing_sign),
so its normalized values pin the chirality convention of the whole
module: jones must come out as 1*t^1 + 1*t^3 - 1*t^4.
"""

import pytest

from oracles import naive_bracket
from pseudolinks import parse_diagram
from pseudolinks.bracket import (
    Bundle,
    bracket,
    bracket_annular,
    bracket_planar,
    bracket_toroidal,
    invariant_bundle,
    jones,
    normalized_bracket,
)
from pseudolinks.diagram import PseudoLinkError, mirror, self_writhe_sum, writhe
from pseudolinks.laurent import DELTA, Laurent
from pseudolinks.moves import apply_move, enumerate_moves, scramble

CLASSICAL_KINDS = ("R1_add", "R1_remove", "R2_add", "R2_remove", "R3")

UNKNOT = """
surface planar
loop L1
"""

# annular closure of the one-crossing 2-braid; the strand winds twice
SIGMA1_CLOSURE = """
surface annular
crossing X c1 (1,2,2,1)
edge 1 w=1
edge 2 w=1
face inner c1.0
face outer c1.2
"""


def lau(*terms):
    out = Laurent.zero()
    for coeff, vars_ in terms:
        out = out + Laurent.term(coeff, vars_)
    return out


# ---- planar anchors -------------------------------------------------------


def test_unknot_is_one():
    assert bracket_planar(parse_diagram(UNKNOT)) == Laurent.const(1)


def test_unlink_is_delta_powers():
    two = parse_diagram("surface planar\nloop L1\nloop L2\n")
    three = parse_diagram("surface planar\nloop L1\nloop L2\nloop L3\n")
    assert bracket_planar(two) == DELTA
    assert bracket_planar(three) == DELTA * DELTA


def test_kink_hand_value(kink):
    # (1,1,2,2) has crossing sign -1, so the kink contributes -A^-3
    assert self_writhe_sum(kink) == -1
    assert bracket_planar(kink) == lau((-1, {"A": -3}))
    assert jones(kink) == Laurent.const(1)


def test_hopf_hand_value(hopf):
    assert bracket_planar(hopf) == lau((-1, {"A": 4}), (-1, {"A": -4}))


def test_trefoil_hand_value(trefoil):
    assert writhe(trefoil).total == 3
    assert bracket_planar(trefoil) == lau((-1, {"A": 5}), (-1, {"A": -3}), (1, {"A": -7}))


def test_trefoil_jones(trefoil):
    assert jones(trefoil).text() == "1*t^1 + 1*t^3 - 1*t^4"


def test_jones_mirror_inverts(trefoil, hopf):
    for d in (trefoil, hopf):
        assert jones(mirror(d)) == jones(d).invert_var("t")


def test_jones_orientation_seed_on_knot(trefoil):
    from pseudolinks.diagram import orient

    cid = trefoil.components[0]
    for to in trefoil.edge_darts[1]:
        seeded = orient(trefoil, {cid: (1, to)})
        assert jones(seeded) == jones(trefoil)


# ---- annular and toroidal anchors ----------------------------------------


def test_annular_loop_values():
    core = parse_diagram("surface annular\nloop L1 class=1\n")
    null = parse_diagram("surface annular\nloop L1 class=0\n")
    both = parse_diagram("surface annular\nloop L1 class=1\nloop L2 class=-1\n")
    assert bracket_annular(core) == Laurent.var("z")
    assert bracket_annular(null) == DELTA
    assert bracket_annular(both) == Laurent.var("z", 2)


def test_toroidal_loop_values():
    a = parse_diagram("surface toroidal\nloop L1 class=(1,0)\n")
    b = parse_diagram("surface toroidal\nloop L1 class=(1,1)\n")
    c = parse_diagram("surface toroidal\nloop L1 class=(-1,0)\n")
    assert bracket_toroidal(a) == Laurent.var("z[1,0]")
    assert bracket_toroidal(b) == Laurent.var("z[1,1]")
    # classes are stored up to sign
    assert bracket_toroidal(c) == Laurent.var("z[1,0]")


def test_sigma1_closure_hand_value():
    d = parse_diagram(SIGMA1_CLOSURE)
    want = lau((1, {"A": 1, "z": 2}), (-1, {"A": 1}), (-1, {"A": -3}))
    assert bracket_annular(d) == want


def test_torus_clasp_hand_value(torus_clasp):
    want = lau((-1, {"A": 4, "z[2,3]": 1}), (-1, {"A": -4, "z[2,3]": 1}))
    assert bracket_toroidal(torus_clasp) == want


# ---- preconditions --------------------------------------------------------


def test_precrossings_rejected(pseudo_trefoil):
    with pytest.raises(PseudoLinkError) as e:
        bracket_planar(pseudo_trefoil)
    assert e.value.code == "PRECROSSINGS_PRESENT"


def test_empty_diagram_rejected():
    with pytest.raises(PseudoLinkError) as e:
        bracket_planar(parse_diagram("surface planar\n"))
    assert e.value.code == "EMPTY_DIAGRAM"


def test_fixed_part_rejected():
    d = parse_diagram(
        "surface planar\nfixed O 1\ncrossing X c1 (1,3,2,4)\ncrossing X c2 (3,1,4,2)\n"
    )
    with pytest.raises(PseudoLinkError) as e:
        bracket_planar(d)
    assert e.value.code == "INVALID_INPUT"


def test_surface_dispatch_rejects_mismatch(trefoil):
    with pytest.raises(PseudoLinkError):
        bracket_annular(trefoil)


# ---- oracle cross-checks --------------------------------------------------


def test_matches_naive_on_fixtures(trefoil, kink, hopf, torus_clasp):
    others = [
        parse_diagram(UNKNOT),
        parse_diagram(SIGMA1_CLOSURE),
        parse_diagram("surface annular\nloop L1 class=1\n"),
    ]
    for d in [trefoil, kink, hopf, torus_clasp] + others:
        assert bracket(d) == naive_bracket(d), d


def test_matches_naive_on_scrambles(trefoil, hopf, torus_clasp):
    seeds = [
        (trefoil, 11),
        (trefoil, 12),
        (hopf, 13),
        (parse_diagram(UNKNOT), 14),
        (parse_diagram(SIGMA1_CLOSURE), 15),
        (torus_clasp, 16),
    ]
    for base, seed in seeds:
        d, _log = scramble(base, steps=6, seed=seed, kinds=CLASSICAL_KINDS)
        if len(d.crossings) > 10:
            d = base
        assert bracket(d) == naive_bracket(d), (base, seed)


# ---- move laws ------------------------------------------------------------


def test_bracket_move_laws(trefoil, hopf):
    curl = (lau((-1, {"A": 3})), lau((-1, {"A": -3})))
    for d in (trefoil, hopf):
        before = bracket_planar(d)
        for s in enumerate_moves(d):
            if s.kind not in ("R1_add", "R1_remove", "R2_add", "R2_remove", "R3"):
                continue
            after = bracket_planar(apply_move(d, s)[0])
            if s.kind == "R1_add":
                assert after in (before * curl[0], before * curl[1]), s.text
            elif s.kind == "R1_remove":
                assert before in (after * curl[0], after * curl[1]), s.text
            else:
                assert after == before, s.text


def test_jones_move_invariance(trefoil, kink, hopf):
    for d in (trefoil, kink, hopf):
        v = jones(d)
        for s in enumerate_moves(d):
            if s.kind.startswith(("R1", "R2", "R3")):
                assert jones(apply_move(d, s)[0]) == v, s.text


# ---- bundles --------------------------------------------------------------


def test_bundle_separates_and_hashes(trefoil):
    b1 = invariant_bundle(trefoil)
    b2 = invariant_bundle(mirror(trefoil))
    b3 = invariant_bundle(parse_diagram(UNKNOT))
    assert b1 != b2 and b1 != b3
    assert len({b1, b2, b3}) == 3
    assert b1.components == 1 and b3.components == 1
    assert not b1.coarse
    assert "bracket=" in b1.text() and "components=1" in b1.text()


def test_bundle_move_invariant(trefoil, torus_clasp):
    for base in (trefoil, parse_diagram(SIGMA1_CLOSURE), torus_clasp):
        b = invariant_bundle(base)
        for seed in (3, 4):
            assert invariant_bundle(scramble(base, steps=8, seed=seed, kinds=CLASSICAL_KINDS)[0]) == b


def test_normalized_bracket_is_curl_corrected(kink):
    assert normalized_bracket(kink) == Laurent.const(1)
