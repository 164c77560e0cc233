"""Move engine checks: census literals first, then round trips.

The round-trip tests lean on canonical_form: applying a move and then
the returned inverse must land on the same canonical text, which pins
label transport, probability bookkeeping and mark maintenance all at
once.
"""

import random
from fractions import Fraction

import pytest

from pseudolinks import (
    MOVE_KINDS,
    apply_move,
    canonical_form,
    catalog_text,
    enumerate_moves,
    parse_diagram,
    parse_site,
    scramble,
    site,
    validate,
)
from conftest import (
    ANNULAR_PSEUDO_TREFOIL,
    HOPF,
    KINK,
    PSEUDO_TREFOIL,
    TORUS_CLASP,
    TREFOIL,
)

UNKNOT_LOOP = "surface planar; loop L1"

FIXTURES = [TREFOIL, KINK, HOPF, PSEUDO_TREFOIL,
            ANNULAR_PSEUDO_TREFOIL, TORUS_CLASP, UNKNOT_LOOP]


def test_site_text_round_trip():
    examples = [
        site("R1_add", edge=3, variant="ttab"),
        site("PR1_add", edge=3, variant="ttba", prob=Fraction(2, 7)),
        site("R1_remove", crossing="c4", slot=2),
        parse_site("R2_add finger=c1.2 across=c2.0 variant=over"),
        parse_site("R2_add across_loop=L2 finger_loop=L1 variant=under"),
        parse_site("R3 face=c1.0"),
    ]
    for s in examples:
        assert parse_site(s.text) == s
        assert s.kind in MOVE_KINDS


def test_unknot_loop_site_census():
    d = parse_diagram(UNKNOT_LOOP)
    sites = enumerate_moves(d)
    texts = sorted(s.text for s in sites)
    assert texts == [
        "PR1_add loop=L1 prob=1/2 variant=ttss",
        "R1_add loop=L1 variant=stts",
        "R1_add loop=L1 variant=ttss",
        "R2_add across_loop=L1 finger_loop=L1 variant=over",
        "R2_add across_loop=L1 finger_loop=L1 variant=under",
    ]


def test_trefoil_has_no_removals(trefoil):
    kinds = {s.kind for s in enumerate_moves(trefoil)}
    assert "R1_remove" not in kinds
    assert "R2_remove" not in kinds
    assert "R3" not in kinds  # alternating triangle pattern is cyclic


def test_kink_statistics(kink):
    # (1,1,2,2) is a circle with one curl: either monogon cancels it
    sites = [s for s in enumerate_moves(kink) if s.kind == "R1_remove"]
    assert [s.text for s in sites] == [
        "R1_remove crossing=c1 slot=0",
        "R1_remove crossing=c1 slot=2",
    ]


def test_kink_removal_gives_unknot(kink):
    s = site("R1_remove", crossing="c1", slot=0)
    out, inv = apply_move(kink, s)
    assert not out.crossings and len(out.loops) == 1
    assert validate(out).ok
    back, _ = apply_move(out, inv)
    assert canonical_form(back) == canonical_form(kink)


def _roundtrip(d, s):
    out, inv = apply_move(d, s)
    rep = validate(out)
    assert rep.ok, f"{s.text}: {rep.violations}"
    back, inv2 = apply_move(out, inv)
    assert canonical_form(back) == canonical_form(d), s.text
    # and the inverse's inverse lands where the first application did
    again, _ = apply_move(back, inv2)
    assert canonical_form(again) == canonical_form(out), s.text


@pytest.mark.parametrize("text", FIXTURES)
def test_every_site_applies_and_inverts(text):
    d = parse_diagram(text)
    for s in enumerate_moves(d):
        _roundtrip(d, s)


@pytest.mark.parametrize("text", [TREFOIL, PSEUDO_TREFOIL, ANNULAR_PSEUDO_TREFOIL])
def test_sites_after_scramble_apply_and_invert(text):
    # organic bigons and triangles show up a few steps in
    d = parse_diagram(text)
    rng = random.Random(7)
    for step in range(6):
        sites = enumerate_moves(d)
        for s in sites[:: max(1, len(sites) // 17)]:
            _roundtrip(d, s)
        d, _ = apply_move(d, sites[rng.randrange(len(sites))])


def test_triangle_sites_appear_and_invert(trefoil):
    # poking one strand across another next to a crossing makes triangles
    found = 0
    d = trefoil
    for seed in range(12):
        dd, _log = scramble(trefoil, 4, seed)
        for s in enumerate_moves(dd):
            if s.kind in ("R3", "PR3", "PR3p"):
                _roundtrip(dd, s)
                found += 1
    assert found > 0


def test_pseudo_moves_track_probability(pseudo_trefoil):
    d = pseudo_trefoil
    s = site("PR1_add", edge=1, variant="ttab", prob=Fraction(1, 3))
    out, inv = apply_move(d, s)
    assert validate(out).ok
    # exactly one new precrossing with weight 1/3 or 2/3 depending on the
    # stored rotation; removing it restores the same canonical text either way
    new = [c for c in out.crossings if c.id not in {x.id for x in d.crossings}]
    assert len(new) == 1 and new[0].kind == "P"
    back, _ = apply_move(out, inv)
    assert canonical_form(back) == canonical_form(d)


def test_scramble_is_reproducible(trefoil):
    a, log_a = scramble(trefoil, 9, seed=3)
    b, log_b = scramble(trefoil, 9, seed=3)
    assert [s.text for s in log_a] == [s.text for s in log_b]
    assert canonical_form(a) == canonical_form(b)
    c, log_c = scramble(trefoil, 9, seed=4)
    assert [s.text for s in log_c] != [s.text for s in log_a]


def test_scramble_results_validate(trefoil, annular_pseudo_trefoil, torus_clasp):
    for d in (trefoil, annular_pseudo_trefoil, torus_clasp):
        for seed in (0, 1, 2):
            out, log = scramble(d, 8, seed)
            assert validate(out).ok
            assert len(log) == 8


def test_fixed_strands_stay_put():
    d = parse_diagram(
        "surface planar; fixed O 1; crossing X c1 (1,3,2,4); "
        "crossing X c2 (3,1,4,2)"
    )
    assert validate(d).ok
    for s in enumerate_moves(d):
        out, _ = apply_move(d, s)
        assert validate(out).ok
        if s.kind.startswith("R1") or s.kind.startswith("PR1"):
            # no kink ever lands on the fixed component
            assert s.get("edge") not in (1, 2) or s.kind.endswith("remove")


def test_mixed_poke_classification():
    d = parse_diagram("surface planar; fixed O 1; crossing X c1 (1,3,2,4); "
                      "crossing X c2 (3,1,4,2)")
    kinds = {s.kind for s in enumerate_moves(d)}
    # the free strand may poke across the fixed one, never plain-R2 it
    assert "MR2_add" in kinds
    finger_edges = {
        d.edge_at(s.get("finger"))
        for s in enumerate_moves(d)
        if s.kind == "MR2_add" and s.get("finger") is not None
    }
    assert finger_edges <= {3, 4}


def test_stale_sites_are_rejected(trefoil, kink):
    from pseudolinks import PseudoLinkError
    bad = [
        site("R1_remove", crossing="c9", slot=0),
        site("R1_remove", crossing="c1", slot=1),
        site("R2_add", finger=None, across=None),
        parse_site("R3 face=c1.0"),
    ]
    for s in bad:
        with pytest.raises(PseudoLinkError):
            apply_move(trefoil, s)
    # a kink removal site built for the kink does not fit the trefoil
    with pytest.raises(PseudoLinkError):
        apply_move(trefoil, site("R1_remove", crossing="c1", slot=0))


def test_catalog_mentions_every_kind():
    text = catalog_text()
    for k in MOVE_KINDS:
        assert k in text
