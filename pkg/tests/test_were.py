"""Resolution enumeration and WeRe sets against paper values and oracles."""

from fractions import Fraction

import pytest

from oracles import naive_bracket, naive_resolutions
from pseudolinks import parse_diagram
from pseudolinks.bracket import invariant_bundle, jones
from pseudolinks.canon import canonical_form
from pseudolinks.diagram import PseudoLinkError, validate
from pseudolinks.laurent import Laurent
from pseudolinks.moves import scramble
from pseudolinks.were import (
    SLOTS02_UNDER,
    SLOTS13_UNDER,
    WeReSet,
    invariant_set,
    prob_model,
    resolutions,
    resolve,
    were_set,
    were_table,
)

# trefoil shadow with one classical crossing kept and two undetermined;
# one of the four resolutions is the classical fixture trefoil
PSEUDO_TREFOIL_2P = """
surface planar
crossing X c1 (1,4,2,5)
crossing P c2 (3,6,4,1)
crossing P c3 (5,2,6,3)
"""

PSEUDO_KINK = """
surface planar
crossing P c1 (1,1,2,2)
prob c1 1/3
"""


def twist(n, kind="P"):
    """Closed 2-braid with n crossings of the given kind (n >= 2).

    Left arcs above crossing i are edges 1..n, right arcs n+1..2n.
    """
    rows = ["surface planar"]
    for i in range(1, n + 1):
        lo = (i - 2) % n + 1  # arc below the crossing wraps around
        tup = (lo, n + lo, n + i, i)
        rows.append(f"crossing {kind} c{i} ({tup[0]},{tup[1]},{tup[2]},{tup[3]})")
    return "\n".join(rows) + "\n"


def test_resolution_count_and_uniform_probs(pseudo_trefoil):
    rs = resolutions(pseudo_trefoil)
    assert len(rs) == 8
    assert all(p == Fraction(1, 8) for _, p in rs)
    assert sum(p for _, p in rs) == 1
    for res, _ in rs:
        assert not res.has_precrossings()
        assert validate(res).ok


def test_zero_precrossings_identity(trefoil):
    rs = resolutions(trefoil)
    assert len(rs) == 1
    assert rs[0][1] == 1
    assert canonical_form(rs[0][0]) == canonical_form(trefoil)


def test_choice_slots_pin_chirality():
    # stored tuple (1,1,2,2): slots02_under keeps it (sign -1 kink),
    # slots13_under rotates to (1,2,2,1) (sign +1 kink)
    from pseudolinks.diagram import self_writhe_sum

    rs = resolutions(parse_diagram(PSEUDO_KINK))
    assert [self_writhe_sum(r) for r, _ in rs] == [-1, 1]


def test_trefoil_appears_once(pseudo_trefoil, trefoil):
    # 3 precrossings: one positive trefoil, one mirror, six unknots
    forms = [canonical_form(r) for r, _ in resolutions(pseudo_trefoil)]
    assert forms.count(canonical_form(trefoil)) == 1


def test_third_probabilities(annular_pseudo_trefoil):
    m = {"c2": Fraction(1, 3), "c3": Fraction(1, 3)}
    rs = resolutions(annular_pseudo_trefoil, m)
    probs = sorted(p for _, p in rs)
    assert probs == [
        Fraction(1, 9),
        Fraction(2, 9),
        Fraction(2, 9),
        Fraction(4, 9),
    ]
    assert sum(probs) == 1


def test_stored_probs_are_the_default():
    d = parse_diagram(PSEUDO_KINK)
    rs = resolutions(d)
    assert [p for _, p in rs] == [Fraction(1, 3), Fraction(2, 3)]
    # an explicit model overrides the stored lines
    rs = resolutions(d, {"c1": Fraction(1, 5)})
    assert [p for _, p in rs] == [Fraction(1, 5), Fraction(4, 5)]


def test_prob_domain_mismatch(pseudo_trefoil):
    with pytest.raises(PseudoLinkError) as e:
        resolutions(pseudo_trefoil, {"c9": Fraction(1, 2)})
    assert e.value.code == "PROB_DOMAIN_MISMATCH"


def test_prob_bounds_checked(pseudo_trefoil):
    with pytest.raises(PseudoLinkError):
        resolutions(pseudo_trefoil, {"c1": Fraction(3, 2)})
    with pytest.raises(PseudoLinkError):
        prob_model(pseudo_trefoil, {"c1": 0.5})


def test_resolve_choice_domain(pseudo_trefoil):
    with pytest.raises(PseudoLinkError) as e:
        resolve(pseudo_trefoil, {"c1": SLOTS02_UNDER})
    assert e.value.code == "PROB_DOMAIN_MISMATCH"
    full = {c: SLOTS13_UNDER for c in ("c1", "c2", "c3")}
    assert validate(resolve(pseudo_trefoil, full)).ok


def test_matches_naive_resolutions(pseudo_trefoil, annular_pseudo_trefoil):
    m = {"c2": Fraction(2, 7), "c3": Fraction(1, 2)}
    for d, model in ((pseudo_trefoil, None), (annular_pseudo_trefoil, m)):
        mine = resolutions(d, model)
        ref = naive_resolutions(d, model)
        assert len(mine) == len(ref)
        for (da, pa), (db, pb) in zip(mine, ref):
            assert pa == pb
            assert canonical_form(da) == canonical_form(db)


def test_paper_planar_were_and_jones(trefoil):
    d = parse_diagram(PSEUDO_TREFOIL_2P)
    w = were_set(d)
    assert isinstance(w, WeReSet)
    assert w.proxy and w.key_kind == "bracket"
    by_prob = {c.probability: c for c in w.classes}
    assert set(by_prob) == {Fraction(1, 4), Fraction(3, 4)}
    assert by_prob[Fraction(1, 4)].key == invariant_bundle(trefoil).text()
    assert canonical_form(trefoil) in {canonical_form(r) for r, _ in resolutions(d)}
    vals = invariant_set(w, jones)
    trefoil_jones = Laurent.var("t") + Laurent.var("t", 3) - Laurent.var("t", 4)
    assert set(vals) == {
        (trefoil_jones, Fraction(1, 4)),
        (Laurent.const(1), Fraction(3, 4)),
    }


def test_annular_pseudo_trefoil_three_classes(annular_pseudo_trefoil):
    # one essential trefoil, two descending essential unknots; the
    # bracket separates the clockwise and counterclockwise ones
    w = were_set(annular_pseudo_trefoil)
    assert len(w.classes) == 3
    assert sorted(c.probability for c in w.classes) == [
        Fraction(1, 4),
        Fraction(1, 4),
        Fraction(1, 2),
    ]
    assert len({c.key for c in w.classes}) == 3


def test_zero_precross_were_is_single_class(trefoil):
    w = were_set(trefoil)
    assert len(w.classes) == 1
    assert w.classes[0].probability == 1


def test_were_key_multiset_move_invariant(pseudo_trefoil, annular_pseudo_trefoil):
    for base in (pseudo_trefoil, annular_pseudo_trefoil):
        want = sorted(
            (c.key, c.probability) for c in were_set(base).classes
        )
        for seed in (21, 22):
            moved, _ = scramble(base, steps=6, seed=seed)
            got = sorted((c.key, c.probability) for c in were_set(moved).classes)
            assert got == want, seed


def test_prob_model_changes_probs_not_keys(pseudo_trefoil):
    w1 = were_set(pseudo_trefoil)
    w2 = were_set(pseudo_trefoil, {c: Fraction(1, 3) for c in ("c1", "c2", "c3")})
    assert {c.key for c in w1.classes} == {c.key for c in w2.classes}
    assert [c.probability for c in w1.classes] != [c.probability for c in w2.classes]


def test_component_count_invariant_set(pseudo_trefoil):
    w = were_set(pseudo_trefoil)
    vals = invariant_set(w, lambda d: len(d.components))
    assert vals == [(1, Fraction(1))]


def test_canonical_key_kind(pseudo_trefoil):
    w = were_set(pseudo_trefoil, key="canonical")
    assert w.key_kind == "canonical"
    # canonical text separates at least as finely as the bundle
    assert len(w.classes) >= len(were_set(pseudo_trefoil).classes)
    assert sum(c.probability for c in w.classes) == 1


def test_twelve_precrossings_scale():
    d = parse_diagram(twist(12))
    assert validate(d).ok
    model = {f"c{i}": Fraction(i, i + 1) for i in range(1, 13)}
    rs = resolutions(d, model)
    assert len(rs) == 4096
    assert sum(p for _, p in rs) == 1
    rs = resolutions(d)
    assert len(rs) == 4096
    assert all(p == Fraction(1, 4096) for _, p in rs)


def test_were_table_format(pseudo_trefoil):
    w = were_set(pseudo_trefoil)
    table = were_table(w, jones)
    lines = table.strip().splitlines()
    assert lines[0].startswith("#") and "proxy" in lines[0]
    rows = [ln for ln in lines if not ln.startswith("#")]
    assert len(rows) == len(w.classes)
    for row in rows:
        cells = [c.strip() for c in row.split("|")]
        assert len(cells) == 4
        assert "/" in cells[1] or cells[1] == "1"
        parse_diagram(cells[2])
