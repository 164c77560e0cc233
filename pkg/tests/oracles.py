"""Reference implementations used to cross-check the library.

Everything in here is deliberately naive: full 2^c state enumeration and
literal loop walks, no sharing, no pruning.  Keep it that way; the point
is a second, independent route to the same numbers.
"""

import dataclasses
from fractions import Fraction
from itertools import product
from math import gcd

from pseudolinks.diagram import (
    PLANAR,
    PRECROSS,
    CLASSICAL,
    Crossing,
    Dart,
    Diagram,
    canonical_class,
    label_add,
    label_is_zero,
    label_neg,
    natural_key,
    rotate,
    zero_label,
)
from pseudolinks.laurent import DELTA, Laurent, zvar


def _directed(d: Diagram, eid: int, depart: Dart):
    # label of the edge read while leaving through `depart`
    lab = d.edge_by_id[eid].label
    if d.reference_dart(eid) == depart:
        return lab
    return label_neg(lab)


def state_loops(d: Diagram, choice):
    """Walk one smoothing state and return the class of every closed loop.

    choice maps crossing id -> "A" or "B".  A joins slots (1,2) and
    (3,0); B joins (0,1) and (2,3).  Free loops are not included.
    """
    hook = {}
    for c in d.crossings:
        pairs = ((1, 2), (3, 0)) if choice[c.id] == "A" else ((0, 1), (2, 3))
        for s, t in pairs:
            hook[Dart(c.id, s)] = Dart(c.id, t)
            hook[Dart(c.id, t)] = Dart(c.id, s)
    out = []
    seen = set()
    for e in d.edges:
        if e.id in seen:
            continue
        start = d.reference_dart(e.id)
        total = zero_label(d.surface)
        u = start
        while True:
            eid = d.edge_at(u)
            seen.add(eid)
            total = label_add(total, _directed(d, eid, u))
            u = hook[d.mate(u)]
            if u == start:
                break
        out.append(canonical_class(total))
    return out


def loop_factor(cls) -> Laurent:
    """Value of one closed state loop on the annulus or torus."""
    if label_is_zero(cls):
        return DELTA
    if isinstance(cls, tuple):
        assert gcd(abs(cls[0]), abs(cls[1])) == 1, cls
        return Laurent.var(zvar(cls[0], cls[1]))
    assert abs(cls) == 1, cls
    return Laurent.var(zvar(cls))


def naive_bracket(d: Diagram) -> Laurent:
    """Kauffman state sum by full enumeration, all surfaces."""
    assert not d.has_precrossings()
    ids = [c.id for c in d.crossings]
    free = [canonical_class(l.cls) for l in d.loops]
    total = Laurent.zero()
    for bits in product("AB", repeat=len(ids)):
        choice = dict(zip(ids, bits))
        a = bits.count("A")
        term = Laurent.term(1, {"A": 2 * a - len(ids)})
        classes = state_loops(d, choice) + free
        if d.surface == PLANAR:
            term = term * DELTA ** (len(classes) - 1)
        else:
            for cls in classes:
                term = term * loop_factor(cls)
        total = total + term
    return total


def naive_resolutions(d: Diagram, probs=None):
    """All 2^n resolutions by direct crossing substitution.

    probs maps precrossing id -> Fraction giving P(under strand through
    slots 0 and 2 of the stored tuple); missing ids fall back to the
    diagram's own prob lines, then to 1/2.  Only safe when no mark or
    orientation seed touches a precrossing, which holds for every
    fixture this file is used with.
    """
    pres = sorted(d.precrossings(), key=natural_key)
    table = dict(d.prob_map)
    if probs:
        table.update(probs)
    out = []
    for bits in product((0, 1), repeat=len(pres)):
        cs = []
        p = Fraction(1)
        flip = dict(zip(pres, bits))
        for c in d.crossings:
            if c.kind != PRECROSS:
                cs.append(c)
                continue
            q = table.get(c.id, Fraction(1, 2))
            if flip[c.id]:
                cs.append(Crossing(c.id, CLASSICAL, rotate(c.edges, 1)).normalized())
                p *= 1 - q
            else:
                cs.append(Crossing(c.id, CLASSICAL, c.edges).normalized())
                p *= q
        out.append((dataclasses.replace(d, crossings=tuple(cs), probs=()), p))
    return out
