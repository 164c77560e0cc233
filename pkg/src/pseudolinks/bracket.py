"""Bracket state sums on the plane, annulus, and torus.

All values are exact Laurent polynomials.  The smoothing convention is
tied to crossing_sign: the A-smoothing joins slots (1,2) and (3,0), the
B-smoothing joins (0,1) and (2,3).  With that pairing a kink of sign s
contributes -A^(3s), so the writhe-corrected values are move invariant.

bracket_planar divides one delta out so the unknot is 1.  The annular
and toroidal brackets keep every loop factor: delta per null loop, z per
essential annular loop, z[p,q] per (p,q) torus loop.  Loops of annular
class beyond +-1 or imprimitive torus class cannot appear for embedded
diagrams; hitting one raises instead of guessing.

The state sum is evaluated by contracting one crossing at a time and
merging partial states that leave the same open strand pairing, which
keeps scrambled diagrams with dozens of crossings tractable.  The naive
2^c enumeration lives with the tests as an independent oracle.
"""

from dataclasses import dataclass
from math import gcd
from typing import Dict, List, Optional, Tuple

from .diagram import (
    ANNULAR,
    PLANAR,
    TOROIDAL,
    Dart,
    Diagram,
    Label,
    PseudoLinkError,
    canonical_class,
    homology_class,
    label_add,
    label_is_zero,
    label_neg,
    natural_key,
    self_writhe_sum,
    writhe,
    zero_label,
)
from .laurent import DELTA, Laurent, zvar

_A_PAIRS = ((1, 2), (3, 0))
_B_PAIRS = ((0, 1), (2, 3))


def _loop_value(surface: str, cls: Label) -> Laurent:
    if surface == PLANAR or label_is_zero(cls):
        return DELTA
    if surface == ANNULAR:
        if abs(cls) != 1:
            raise PseudoLinkError(
                "ASSERT_SIMPLE_CLASS", f"annular state loop of class {cls}"
            )
        return Laurent.var(zvar(cls))
    p, q = cls
    if gcd(abs(p), abs(q)) != 1:
        raise PseudoLinkError(
            "ASSERT_PRIMITIVE", f"toroidal state loop of class ({p},{q})"
        )
    return Laurent.var(zvar(p, q))


def _dirval(d: Diagram, eid: int, depart: Dart) -> Label:
    lab = d.edge_by_id[eid].label
    return lab if d.reference_dart(eid) == depart else label_neg(lab)


def _order(d: Diagram) -> List[str]:
    """Crossing processing order keeping the open frontier small."""
    ids = sorted((c.id for c in d.crossings), key=natural_key)
    if not ids:
        return []
    by_id = d.crossing_by_id
    pending = set(ids)
    frontier: set = set()
    out: List[str] = []
    while pending:
        if not out:
            nxt = ids[0]
        else:
            nxt = max(
                sorted(pending, key=natural_key),
                key=lambda cid: sum(1 for e in by_id[cid].edges if e in frontier),
            )
        pending.discard(nxt)
        out.append(nxt)
        for slot in range(4):
            eid = by_id[nxt].edges[slot]
            if eid in frontier:
                frontier.discard(eid)
            elif d.mate(Dart(nxt, slot)).crossing != nxt:
                frontier.add(eid)
    return out


Chain = Tuple[Dart, Dart, Label]


def _attach(d: Diagram, cid: str, pairing: Tuple[Chain, ...], arc_pairs):
    """Glue one smoothed crossing onto the open strand pairing.

    Returns (new pairing, classes of loops that closed here)."""
    c = d.crossing_by_id[cid]
    carried: List[Chain] = []
    chains: Dict[int, List] = {}
    ends: Dict[Dart, List[int]] = {}
    nid = 0

    def add(x, y, v):
        nonlocal nid
        chains[nid] = [x, y, v]
        ends.setdefault(x, []).append(nid)
        ends.setdefault(y, []).append(nid)
        nid += 1

    local_ends = set()
    for x, y, v in pairing:
        if x.crossing == cid or y.crossing == cid:
            add(x, y, v)
            local_ends.update(e for e in (x, y) if e.crossing == cid)
        else:
            carried.append((x, y, v))

    seen_edges = set()
    for s in range(4):
        here = Dart(cid, s)
        if here in local_ends:
            continue  # strand already swallowed this edge
        eid = c.edges[s]
        if eid in seen_edges:
            continue
        seen_edges.add(eid)
        add(here, d.mate(here), _dirval(d, eid, here))
    for s1, s2 in arc_pairs:
        add(Dart(cid, s1), Dart(cid, s2), zero_label(d.surface))

    loops: List[Label] = []
    for s in range(4):
        k = Dart(cid, s)
        inc = [i for i in ends.get(k, ()) if i in chains]
        if not inc:
            continue  # consumed while gluing an earlier slot
        assert len(inc) == 2, (k, inc)
        if inc[0] == inc[1]:
            x, y, v = chains.pop(inc[0])
            loops.append(canonical_class(v))
            continue
        xi, yi, vi = chains.pop(inc[0])
        xj, yj, vj = chains.pop(inc[1])
        if yi != k:
            xi, yi, vi = yi, xi, label_neg(vi)
        if xj != k:
            xj, yj, vj = yj, xj, label_neg(vj)
        ends.pop(k, None)
        add(xi, yj, label_add(vi, vj))

    for x, y, v in chains.values():
        if (y, x) < (x, y):
            x, y, v = y, x, label_neg(v)
        carried.append((x, y, v))
    return tuple(sorted(carried, key=lambda ch: (ch[0], ch[1]))), loops


def _contract(d: Diagram) -> Laurent:
    """Sum over all smoothing states with a delta for every closed loop."""
    states: Dict[Tuple[Chain, ...], Laurent] = {(): Laurent.const(1)}
    for cid in _order(d):
        nxt: Dict[Tuple[Chain, ...], Laurent] = {}
        for pairing, coeff in states.items():
            for exp, pairs in ((1, _A_PAIRS), (-1, _B_PAIRS)):
                new_pairing, loops = _attach(d, cid, pairing, pairs)
                term = coeff * Laurent.term(1, {"A": exp})
                for cls in loops:
                    term = term * _loop_value(d.surface, cls)
                acc = nxt.get(new_pairing)
                nxt[new_pairing] = term if acc is None else acc + term
        states = {k: v for k, v in nxt.items() if not v.is_zero()}
    assert all(k == () for k in states), "open strands left after contraction"
    total = states.get((), Laurent.zero())
    for l in d.loops:
        total = total * _loop_value(d.surface, canonical_class(l.cls))
    return total


def _delta_quotient(p: Laurent) -> Laurent:
    # exact division by delta; planar state sums are A-only polynomials
    coeffs: Dict[int, int] = {}
    hi = 0
    for mono, c in p.terms().items():
        assert all(v == "A" for v, _ in mono), mono
        e = mono[0][1] if mono else 0
        coeffs[e] = c
        hi = max(hi, e)
    out = Laurent.zero()
    while coeffs:
        e = min(coeffs)
        c = coeffs.pop(e)
        assert e <= hi + 4, "delta does not divide this polynomial"
        out = out + Laurent.term(-c, {"A": e + 2})
        n = coeffs.get(e + 4, 0) - c
        if n:
            coeffs[e + 4] = n
        else:
            coeffs.pop(e + 4, None)
    return out


def _guard(d: Diagram, surface: str, name: str) -> None:
    if d.surface != surface:
        raise PseudoLinkError("INVALID_INPUT", f"{name} needs a {surface} diagram")
    if d.fixed.kind is not None:
        raise PseudoLinkError("INVALID_INPUT", f"{name} cannot take a mixed diagram")
    if d.has_precrossings():
        raise PseudoLinkError(
            "PRECROSSINGS_PRESENT", f"{name} needs every crossing resolved"
        )
    if not d.crossings and not d.loops:
        raise PseudoLinkError("EMPTY_DIAGRAM", f"{name} of nothing is undefined")


def bracket_planar(d: Diagram) -> Laurent:
    """Kauffman bracket, normalized so the unknot gives 1."""
    _guard(d, PLANAR, "bracket_planar")
    return _delta_quotient(_contract(d))


def bracket_annular(d: Diagram) -> Laurent:
    """Annular bracket: delta per null loop, z per essential loop."""
    _guard(d, ANNULAR, "bracket_annular")
    return _contract(d)


def bracket_toroidal(d: Diagram) -> Laurent:
    """Toroidal bracket: delta per null loop, z[p,q] per (p,q) loop."""
    _guard(d, TOROIDAL, "bracket_toroidal")
    return _contract(d)


def bracket(d: Diagram) -> Laurent:
    """Surface-appropriate bracket of a resolved moving-only diagram."""
    if d.surface == PLANAR:
        return bracket_planar(d)
    if d.surface == ANNULAR:
        return bracket_annular(d)
    return bracket_toroidal(d)


def _curl_pow(k: int) -> Laurent:
    # (-A^3)^k for any integer k
    return Laurent.term(-1 if k % 2 else 1, {"A": 3 * k})


def jones(d: Diagram) -> Laurent:
    """Jones polynomial of a planar classical diagram.

    Uses the seeded orientation when one is stored; otherwise the writhe
    counts self-crossings only, which is orientation free and agrees
    with the usual writhe on knots.  The result comes back in t when
    every exponent rewrites through t = A^-4, else in A; check
    't' in value.variables() to tell.
    """
    b = bracket_planar(d)
    w = writhe(d).total if d.orient_seeds else self_writhe_sum(d)
    f = _curl_pow(-w) * b
    try:
        return f.map_var_exponent("A", "t", -4)
    except ValueError:
        return f


def normalized_bracket(d: Diagram) -> Laurent:
    """(-A^3)^(-sw) times the surface bracket, sw the self-writhe sum.

    Self-writhe needs no orientation choice, so this value is invariant
    under all classical moves on every surface."""
    return _curl_pow(-self_writhe_sum(d)) * bracket(d)


def _label_text(c: Label) -> str:
    if c is None:
        return "0"
    if isinstance(c, tuple):
        return f"({c[0]},{c[1]})"
    return str(c)


@dataclass(frozen=True)
class Bundle:
    """Grouping key: normalized bracket + homology classes + size."""

    bracket: Laurent
    classes: Tuple[Label, ...]
    components: int
    coarse: bool = False

    def text(self) -> str:
        cs = ",".join(_label_text(c) for c in self.classes)
        tail = "; coarse" if self.coarse else ""
        return (
            f"bracket={self.bracket.text()}; classes=[{cs}];"
            f" components={self.components}{tail}"
        )


def _class_multiset(d: Diagram) -> Tuple[Label, ...]:
    return tuple(sorted((homology_class(d, cid) for cid in d.components), key=repr))


def coarse_bundle(d: Diagram) -> Bundle:
    """Planar-union reading of a diagram, flagged coarse.

    Rings count as ordinary link components and the surface structure
    is ignored.  Weaker than the surface bundle, but defined for every
    resolved mixed diagram and stable under every move kind, standard
    position or not.
    """
    value = _curl_pow(-self_writhe_sum(d)) * _delta_quotient(_contract(d))
    return Bundle(value, _class_multiset(d), len(d.components), coarse=True)


def invariant_bundle(d: Diagram) -> Bundle:
    """Move-invariant key of a resolved diagram.

    Mixed diagrams are converted to their surface form first; when the
    fixed part is not in standard position the whole diagram is read as
    a planar link instead and the bundle is flagged coarse.
    """
    if d.fixed.kind is not None:
        from .convert import from_h_mixed, from_o_mixed

        conv = from_o_mixed if d.fixed.kind == "O" else from_h_mixed
        try:
            return invariant_bundle(conv(d))
        except PseudoLinkError as err:
            if err.code != "NOT_STANDARD_POSITION":
                raise
        return coarse_bundle(d)
    return Bundle(normalized_bracket(d), _class_multiset(d), len(d.components))
