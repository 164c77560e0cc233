"""Diagram rewriting: the Reidemeister family for pseudo links.

Every move is located by a MoveSite carrying the kind plus enough
bindings to replay it on an equal diagram.  enumerate_moves lists the
sites present, apply_move performs one and returns the site that undoes
it.  Site texts are deterministic and parse_site(str(site)) round-trips.

Ground rules baked into the catalog:

* fixed strands are never the moving role; only the MR2/MR3/MPR3/HMR3
  patterns may involve them, and only as the strand slid across.
* a bigon is only cancellable when both of its crossings are classical.
  Cancelling a bigon whose boundary meets a precrossing would not commute
  with resolving, so no such move exists.
* the poke family is classified by what the poked strands are: a fixed
  target makes it MR2, a strand carrying a precrossing at either end
  makes it PR2, otherwise plain R2.
* free loops join pokes only when their class is null; the model stores
  no position for an essential loop, so pokes over one are not offered.
* labels on new arcs are forced by keeping every face sum unchanged, and
  triangle moves pre-gauge the three inner labels to zero with vertex
  star moves before rewiring.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .diagram import (
    ANNULAR,
    CLASSICAL,
    PLANAR,
    PRECROSS,
    Crossing,
    Dart,
    Diagram,
    Edge,
    FixedPart,
    FreeLoop,
    Label,
    Marks,
    PseudoLinkError,
    build_diagram,
    canonical_class,
    label_add,
    label_is_zero,
    label_neg,
    natural_key,
    rotate,
    zero_label,
)

MOVE_KINDS = (
    "R1_add", "R1_remove", "R2_add", "R2_remove", "R3",
    "PR1_add", "PR1_remove", "PR2_add", "PR2_remove", "PR3", "PR3p",
    "MR2_add", "MR2_remove", "MR3", "MPR3", "HMR3",
)

_KINK_EDGE_TAGS = ("ttab", "ttba", "attb", "btta")
_KINK_LOOP_TAGS = ("ttss", "stts")
_POKE_VARIANTS = ("over", "under")

_DART_KEYS = frozenset({"finger", "across", "face"})
_INT_KEYS = frozenset({"edge", "slot"})
_FRAC_KEYS = frozenset({"prob"})
_STR_KEYS = frozenset({"crossing", "variant", "loop", "finger_loop", "across_loop"})
_DART_RE = re.compile(r"^([A-Za-z][A-Za-z0-9_-]*)\.([0-3])$")


def _bad(msg: str) -> PseudoLinkError:
    return PseudoLinkError("INVALID_SITE", msg)


@dataclass(frozen=True)
class MoveSite:
    """One applicable move: a kind plus sorted key=value bindings."""

    kind: str
    bind: Tuple[Tuple[str, object], ...]

    def get(self, key: str, default=None):
        for k, v in self.bind:
            if k == key:
                return v
        return default

    @property
    def text(self) -> str:
        parts = [self.kind]
        for k, v in self.bind:
            parts.append(f"{k}={v}")
        return " ".join(parts)

    def __str__(self) -> str:
        return self.text


def site(kind: str, **kw) -> MoveSite:
    return MoveSite(kind, tuple(sorted(kw.items())))


def parse_site(text: str) -> MoveSite:
    toks = text.split()
    if not toks:
        raise _bad("empty site text")
    kind = toks[0]
    if kind not in MOVE_KINDS:
        raise _bad(f"unknown move kind {kind!r}")
    kw = {}
    for tok in toks[1:]:
        key, eq, val = tok.partition("=")
        if not eq:
            raise _bad(f"bad site token {tok!r}")
        if key in _DART_KEYS:
            m = _DART_RE.match(val)
            if not m:
                raise _bad(f"bad dart {val!r}")
            kw[key] = Dart(m.group(1), int(m.group(2)))
        elif key in _INT_KEYS:
            if not re.fullmatch(r"-?\d+", val):
                raise _bad(f"bad integer {val!r}")
            kw[key] = int(val)
        elif key in _FRAC_KEYS:
            try:
                kw[key] = Fraction(val)
            except (ValueError, ZeroDivisionError):
                raise _bad(f"bad fraction {val!r}")
        elif key in _STR_KEYS:
            kw[key] = val
        else:
            raise _bad(f"unknown site key {key!r}")
    return site(kind, **kw)


# ---------------------------------------------------------------- helpers

def _dval(d: Diagram, eid: int, from_dart: Dart) -> Label:
    """Edge label measured departing from_dart instead of the reference."""
    e = d.edge_by_id[eid]
    return e.label if d.edge_darts[eid][0] == from_dart else label_neg(e.label)


def _p_incident(d: Diagram, eid: int) -> bool:
    return any(
        d.crossing_by_id[dt.crossing].kind == PRECROSS for dt in d.edge_darts[eid]
    )


def _null_class(cls: Label) -> bool:
    return cls is None or cls == 0 or cls == (0, 0)


def _remap_fixed(fx: FixedPart, moves: Dict) -> FixedPart:
    if fx.kind is None or not moves:
        return fx
    g = lambda r: moves.get(r, r)
    return FixedPart(kind=fx.kind, o=g(fx.o), m=g(fx.m), l=g(fx.l))


def _base(d: Diagram, skip_crossings=()):
    """Mutable copies of the diagram guts, in raw (stored-slot) form."""
    cxs = {
        c.id: [c.kind, list(c.edges)]
        for c in d.crossings
        if c.id not in skip_crossings
    }
    evals: Dict[int, Tuple[Label, Optional[Dart]]] = {}
    for e in d.edges:
        evals[e.id] = (e.label, d.edge_darts[e.id][0])
    probs = {cid: p for cid, p in d.probs if cid not in skip_crossings}
    return cxs, evals, probs, list(d.loops)


def _set_slot(cxs, dart: Dart, eid: int) -> None:
    cxs[dart.crossing][1][dart.slot] = eid


def _choose_marks(dg: Diagram, hints) -> Marks:
    plus, minus = [], []
    for f in dg.faces:
        s = dg.face_sum(f)
        if s == 1:
            plus.append(f)
        elif s == -1:
            minus.append(f)

    def pick(cands, hint):
        if hint is not None:
            for f in cands:
                if hint in f:
                    return f
        return cands[0]

    if plus and minus:
        return Marks(pick(plus, hints[0])[0], pick(minus, hints[1])[0])
    a = min(dg.darts)
    return Marks(a, a)


def _assemble(d, cxs, evals, loops, probs, fixed, hints):
    """Build a Diagram from raw parts.

    cxs: {cid: [kind, slots]} with slots in any rotation; evals:
    {eid: (value, anchor)} where value is the label measured departing
    the raw anchor dart (anchor None means the value is direction free,
    i.e. zero).  probs are in the raw rotation.  Returns the diagram and
    a raw-dart -> final-dart mapping.
    """
    rot: Dict[str, int] = {}
    rows = []
    for cid in sorted(cxs, key=natural_key):
        kind, slots = cxs[cid]
        tup = tuple(slots)
        c = Crossing(cid, kind, tup).normalized()
        choices = (0, 2) if kind == CLASSICAL else (0, 1, 2, 3)
        rot[cid] = next(r for r in choices if rotate(tup, r) == c.edges)
        rows.append(c)

    def dmap(dt: Optional[Dart]) -> Optional[Dart]:
        if dt is None:
            return None
        r = rot.get(dt.crossing)
        if r is None:
            return None
        return Dart(dt.crossing, (dt.slot - r) % 4)

    occ: Dict[int, List[Dart]] = {}
    for c in rows:
        for s, eid in enumerate(c.edges):
            occ.setdefault(eid, []).append(Dart(c.id, s))

    edges = []
    for eid in sorted(evals):
        val, anchor = evals[eid]
        ds = sorted(occ.get(eid, ()))
        if len(ds) != 2:
            raise _bad(f"surgery left edge {eid} with {len(ds)} ends")
        if anchor is None:
            stored = val
        else:
            a = dmap(anchor)
            stored = val if a == ds[0] else label_neg(val)
        edges.append(Edge(eid, stored, False))

    prob_rows = sorted(
        (cid, (1 - p) if rot[cid] % 2 else p) for cid, p in probs.items()
    )
    dg = build_diagram(d.surface, rows, edges, tuple(loops), fixed, None, (), prob_rows)
    if d.surface == ANNULAR and dg.crossings:
        hm = tuple(dmap(h) for h in hints)
        dg = build_diagram(
            d.surface, rows, edges, tuple(loops), fixed,
            _choose_marks(dg, hm), (), prob_rows,
        )
    return dg, dmap


def _hints(d: Diagram):
    if d.marks is None:
        return (None, None)
    return (d.marks.inner, d.marks.outer)


@dataclass
class _Cut:
    cxs: dict
    evals: dict
    probs: dict
    loops: list
    fixed: FixedPart
    chains: list      # (edge tuple, value from first end, ends or None)
    results: list     # merged edge id, or loop id for a closed chain


def _delete(d: Diagram, gone) -> _Cut:
    """Remove crossings, splicing each strand straight through.

    Runs of edges through removed crossings merge under the smallest id;
    runs that close up become free loops with the accumulated class.
    """
    gone = set(gone)
    cxs = {
        c.id: [c.kind, list(c.edges)] for c in d.crossings if c.id not in gone
    }
    probs = {cid: p for cid, p in d.probs if cid not in gone}
    touched = sorted({d.edge_at(Dart(c, s)) for c in gone for s in range(4)})
    evals: Dict[int, Tuple[Label, Optional[Dart]]] = {}
    for e in d.edges:
        if e.id not in touched:
            evals[e.id] = (e.label, d.edge_darts[e.id][0])

    seen = set()
    chains = []
    for eid in touched:
        if eid in seen:
            continue
        live = [dt for dt in d.edge_darts[eid] if dt.crossing not in gone]
        if not live:
            continue
        u = live[0]
        val = _dval(d, eid, u)
        run = [eid]
        seen.add(eid)
        cur = d.mate(u)
        while cur.crossing in gone:
            step = Dart(cur.crossing, (cur.slot + 2) % 4)
            nxt = d.edge_at(step)
            val = label_add(val, _dval(d, nxt, step))
            run.append(nxt)
            seen.add(nxt)
            cur = d.mate(step)
        chains.append((tuple(run), val, (u, cur)))
    for eid in touched:
        if eid in seen:
            continue
        u = d.edge_darts[eid][0]
        val = _dval(d, eid, u)
        run = [eid]
        seen.add(eid)
        cur = d.mate(u)
        while True:
            step = Dart(cur.crossing, (cur.slot + 2) % 4)
            if step == u:
                break
            nxt = d.edge_at(step)
            val = label_add(val, _dval(d, nxt, step))
            run.append(nxt)
            seen.add(nxt)
            cur = d.mate(step)
        chains.append((tuple(run), val, None))

    chains.sort(key=lambda ch: min(ch[0]))
    loops = list(d.loops)
    results = []
    comp_moves: Dict = {}
    loop_n = int(d.next_loop_id()[1:])
    for run, val, ends in chains:
        m = min(run)
        if ends is not None:
            u, w = ends
            _set_slot(cxs, u, m)
            _set_slot(cxs, w, m)
            evals[m] = (val, u)
            results.append(m)
        else:
            lid = f"L{loop_n}"
            loop_n += 1
            loops.append(FreeLoop(lid, canonical_class(val), d.edge_by_id[m].fixed))
            comp_moves[d.component_of_edge[m]] = lid
            results.append(lid)
    return _Cut(cxs, evals, probs, loops,
                _remap_fixed(d.fixed, comp_moves), chains, results)


# ------------------------------------------------------------------ kinks

def _kink_add(d: Diagram, s: MoveSite):
    pseudo = s.kind == "PR1_add"
    tag = s.get("variant")
    cid = d.next_crossing_id()
    n = d.next_id()
    cxs, evals, probs, loops = _base(d)
    zero = zero_label(d.surface)
    comp_moves: Dict = {}

    eid = s.get("edge")
    lid = s.get("loop")
    if (eid is None) == (lid is None):
        raise _bad("kink add needs exactly one of edge=, loop=")
    if eid is not None:
        if eid not in d.edge_by_id:
            raise _bad(f"no edge {eid}")
        if d.edge_by_id[eid].fixed:
            raise _bad("kinks never go on fixed strands")
        tags = ("ttab", "ttba") if pseudo else _KINK_EDGE_TAGS
        if tag not in tags:
            raise _bad(f"bad kink variant {tag!r}")
        d0, d1 = d.edge_darts[eid]
        t, other = n, n + 1
        tup = {
            "ttab": (t, t, eid, other),
            "ttba": (t, t, other, eid),
            "attb": (eid, t, t, other),
            "btta": (other, t, t, eid),
        }[tag]
        cxs[cid] = [PRECROSS if pseudo else CLASSICAL, list(tup)]
        _set_slot(cxs, d1, other)
        evals[eid] = (_dval(d, eid, d0), d0)
        evals[other] = (zero, None)
        evals[t] = (zero, None)
    else:
        row = d.loop_by_id.get(lid)
        if row is None:
            raise _bad(f"no loop {lid}")
        if row.fixed:
            raise _bad("kinks never go on fixed strands")
        if d.surface == ANNULAR and row.cls not in (None, 0, 1, -1):
            raise _bad("annular loop class out of range for a kink")
        tags = ("ttss",) if pseudo else _KINK_LOOP_TAGS
        if tag not in tags:
            raise _bad(f"bad kink variant {tag!r}")
        t, st = n, n + 1
        tup = {"ttss": (t, t, st, st), "stts": (st, t, t, st)}[tag]
        cxs[cid] = [PRECROSS if pseudo else CLASSICAL, list(tup)]
        evals[t] = (zero, None)
        cls = row.cls if row.cls is not None else zero
        anchor = Dart(cid, tup.index(st))
        evals[st] = (cls, anchor)
        loops = [l for l in loops if l.id != lid]
        comp_moves[lid] = t

    if pseudo:
        p = s.get("prob")
        if p is None or not (0 <= p <= 1):
            raise _bad("PR1_add needs prob= in [0,1]")
        probs[cid] = p

    fixed = _remap_fixed(d.fixed, comp_moves)
    dg, dmap = _assemble(d, cxs, evals, loops, probs, fixed, _hints(d))
    t_darts = sorted(dmap(Dart(cid, i)) for i, x in enumerate(cxs[cid][1]) if x == n)
    a, b = t_darts
    slot = a.slot if (a.slot + 1) % 4 == b.slot else b.slot
    inv = "PR1_remove" if pseudo else "R1_remove"
    return dg, site(inv, crossing=cid, slot=slot)


def _kink_remove(d: Diagram, s: MoveSite):
    pseudo = s.kind == "PR1_remove"
    cid = s.get("crossing")
    sl = s.get("slot")
    c = d.crossing_by_id.get(cid)
    if c is None or sl not in (0, 1, 2, 3):
        raise _bad("no such kink")
    if c.kind != (PRECROSS if pseudo else CLASSICAL):
        raise _bad("crossing kind does not match the move")
    t = c.edges[sl]
    if t != c.edges[(sl + 1) % 4]:
        raise _bad("slot does not hold a kink loop")
    if d.edge_by_id[t].fixed:
        raise _bad("kinks never go on fixed strands")
    if not label_is_zero(d.edge_by_id[t].label):
        raise _bad("kink loop label must be zero")

    x = c.edges[(sl + 2) % 4]
    p_old = d.prob_map.get(cid) if pseudo else None
    cut = _delete(d, {cid})
    dg, dmap = _assemble(d, cut.cxs, cut.evals, cut.loops, cut.probs,
                         cut.fixed, _hints(d))

    res = cut.results[0]
    if isinstance(res, str):                       # the strand closed up
        tag = "ttss" if (pseudo or sl % 2 == 0) else "stts"
        if pseudo:
            pr = p_old if sl % 2 == 0 else 1 - p_old
            return dg, site("PR1_add", loop=res, variant=tag, prob=pr)
        return dg, site("R1_add", loop=res, variant=tag)

    u_x = d.mate(Dart(cid, (sl + 2) % 4))
    ref_is_x = dg.edge_darts[res][0] == dmap(u_x)
    if pseudo:
        tag = "ttab" if ref_is_x else "ttba"
        pr = p_old if sl % 2 == 0 else 1 - p_old
        return dg, site("PR1_add", edge=res, variant=tag, prob=pr)
    if sl % 2 == 0:
        tag = "ttab" if ref_is_x else "ttba"
    else:
        tag = "btta" if ref_is_x else "attb"
    return dg, site("R1_add", edge=res, variant=tag)


# ------------------------------------------------------------------ pokes

def _poke_label_repair(d, dg, dmap, evals, cxs, span, poked):
    """True if evals were adjusted and the caller must reassemble.

    Splitting the poked face can strand cancelling winding contributions
    on opposite sides of the new finger; every other face keeps its sum
    automatically, because a split strand's far arc inherits the old far
    dart's flank.  The poked face's own sum stays with the part holding
    its mark (annular) or its least dart, and the surplus is pushed back
    across the arcs in span as a small dual flow.
    """
    zero = zero_label(d.surface)
    rmap = {}
    for c in d.crossings:
        for s0 in range(4):
            y = Dart(c.id, s0)
            rmap[dmap(y)] = y

    sp = d.face_sum(poked)
    des = None
    if not label_is_zero(sp):
        des = poked[0]
        if d.surface == ANNULAR and d.marks is not None:
            want = d.marks.inner if sp == 1 else d.marks.outer
            if want in poked:
                des = want
    ndes = dmap(des) if des is not None else None

    defects = {}
    for f in dg.faces:
        olds = {d.face_of_dart[rmap[x]] for x in f if x in rmap}
        if not olds:
            tgt = zero
        else:
            if len(olds) != 1:
                raise _bad("poke would merge faces; site is not usable")
            o = olds.pop()
            tgt = d.face_sum(o)
            if o == poked and not label_is_zero(sp) and ndes not in f:
                tgt = zero
        delta = label_add(dg.face_sum(f), label_neg(tgt))
        if not label_is_zero(delta):
            defects[f[0]] = delta
    if not defects:
        return False

    # dual flow, faces keyed by their least dart, across span arcs only
    adj = {}
    for e in sorted(span):
        x1, x2 = dg.edge_darts[e]
        f1 = dg.face_of_dart[x1][0]
        f2 = dg.face_of_dart[x2][0]
        if f1 == f2:
            continue
        adj.setdefault(f1, []).append((e, 1, f2))
        adj.setdefault(f2, []).append((e, -1, f1))

    flow = {}
    seen = set()
    for root in sorted(adj):
        if root in seen:
            continue
        order, parent = [root], {root: None}
        seen.add(root)
        i = 0
        while i < len(order):
            u = order[i]
            i += 1
            for e, sg, v in adj.get(u, ()):
                if v not in parent:
                    parent[v] = (u, e, -sg)
                    seen.add(v)
                    order.append(v)
        resid = {u: defects.get(u, zero) for u in order}
        for u in reversed(order):
            pr = parent[u]
            r = resid[u]
            if pr is None:
                if not label_is_zero(r):
                    raise _bad("winding cannot be rerouted through this poke")
                continue
            if label_is_zero(r):
                continue
            pu, e, sv = pr
            flow[e] = label_neg(r) if sv == 1 else r
            resid[pu] = label_add(resid[pu], r)
    for k, v in defects.items():
        if k not in seen:
            raise _bad("winding cannot be rerouted through this poke")

    raws = {}
    for cid, (_k, slots) in cxs.items():
        for i, x in enumerate(slots):
            if x in span:
                raws.setdefault(x, []).append(Dart(cid, i))
    for e, t in flow.items():
        if label_is_zero(t):
            continue
        ref = dg.edge_darts[e][0]
        r = next(x for x in raws[e] if dmap(x) == ref)
        val, anch = evals[e]
        if anch is not None and anch != r:
            val = label_neg(val)
        evals[e] = (label_add(val, t), r)
    return True


def _poke_kind(d: Diagram, finger_eid: Optional[int], across_eid: Optional[int],
               across_fixed: bool) -> str:
    if across_fixed:
        return "MR2_add"
    for eid in (finger_eid, across_eid):
        if eid is not None and _p_incident(d, eid):
            return "PR2_add"
    return "R2_add"


def _rot1(t):
    return t[1:] + t[:1]


def _poke_add(d: Diagram, s: MoveSite):
    var = s.get("variant")
    if var not in _POKE_VARIANTS:
        raise _bad(f"bad poke variant {var!r}")
    fd, fl = s.get("finger"), s.get("finger_loop")
    ad, al = s.get("across"), s.get("across_loop")
    if (fd is None) == (fl is None) or (ad is None) == (al is None):
        raise _bad("poke needs one finger and one across binding")

    n = d.next_id()
    Xc = d.next_crossing_id()
    Yc = f"c{int(Xc[1:]) + 1}"
    cxs, evals, probs, loops = _base(d)
    zero = zero_label(d.surface)
    comp_moves: Dict = {}

    def need_loop(lid):
        row = d.loop_by_id.get(lid)
        if row is None:
            raise _bad(f"no loop {lid}")
        if not _null_class(row.cls):
            raise _bad("only null loops take part in pokes")
        return row

    def drop_loop(lid, new_min):
        nonlocal loops
        loops = [l for l in loops if l.id != lid]
        comp_moves[lid] = new_min

    if fd is not None and ad is not None:
        try:
            a, b = d.edge_at(fd), d.edge_at(ad)
        except (KeyError, PseudoLinkError):
            raise _bad("poke darts do not exist")
        if a == b:
            raise _bad("poking an edge across itself is not offered")
        if d.edge_by_id[a].fixed:
            raise _bad("the finger strand must be free to move")
        if d.face_of_dart[fd] != d.face_of_dart[ad]:
            raise _bad("poke darts must share a face")
        kind = _poke_kind(d, a, b, d.edge_by_id[b].fixed)
        a_mid, a_post, b_mid, b_post = n, n + 1, n + 2, n + 3
        da2 = next(x for x in d.edge_darts[a] if x != fd)
        db2 = next(x for x in d.edge_darts[b] if x != ad)
        # the face walk keeps its interior to the right, so the two poked
        # segments run anti-parallel: the kept across arc lands on the far
        # crossing, its tail arc on the near one
        Xt = [b_post, a_mid, b_mid, a]
        Yt = [b_mid, a_mid, b, a_post]
        _set_slot(cxs, da2, a_post)
        _set_slot(cxs, db2, b_post)
        evals[a] = (_dval(d, a, fd), fd)
        evals[b] = (_dval(d, b, ad), ad)
        for e in (a_mid, a_post, b_mid, b_post):
            evals[e] = (zero, None)
        mids = (a_mid, b_mid)
        poked = d.face_of_dart[fd]
        span = {a, a_mid, a_post, b, b_mid, b_post}
    elif fl is not None and ad is not None:
        row = need_loop(fl)
        if row.fixed:
            raise _bad("the finger strand must be free to move")
        try:
            b = d.edge_at(ad)
        except (KeyError, PseudoLinkError):
            raise _bad("poke darts do not exist")
        kind = _poke_kind(d, None, b, d.edge_by_id[b].fixed)
        l, a_mid, b_mid, b_post = n, n + 1, n + 2, n + 3
        db2 = next(x for x in d.edge_darts[b] if x != ad)
        Xt = [b_post, a_mid, b_mid, l]
        Yt = [b_mid, a_mid, b, l]
        _set_slot(cxs, db2, b_post)
        evals[b] = (_dval(d, b, ad), ad)
        for e in (l, a_mid, b_mid, b_post):
            evals[e] = (zero, None)
        drop_loop(fl, min(l, a_mid))
        mids = (a_mid, b_mid)
        poked = d.face_of_dart[ad]
        span = {l, a_mid, b, b_mid, b_post}
    elif fd is not None and al is not None:
        row = need_loop(al)
        try:
            a = d.edge_at(fd)
        except (KeyError, PseudoLinkError):
            raise _bad("poke darts do not exist")
        if d.edge_by_id[a].fixed:
            raise _bad("the finger strand must be free to move")
        kind = _poke_kind(d, a, None, row.fixed)
        a_mid, a_post, b_mid, l = n, n + 1, n + 2, n + 3
        da2 = next(x for x in d.edge_darts[a] if x != fd)
        Xt = [l, a_mid, b_mid, a]
        Yt = [b_mid, a_mid, l, a_post]
        _set_slot(cxs, da2, a_post)
        evals[a] = (_dval(d, a, fd), fd)
        for e in (a_mid, a_post, b_mid, l):
            evals[e] = (zero, None)
        drop_loop(al, min(b_mid, l))
        mids = (a_mid, b_mid)
        poked = d.face_of_dart[fd]
        span = {a, a_mid, a_post, b_mid, l}
    else:
        rf = need_loop(fl)
        poked, span = None, set()
        if rf.fixed:
            raise _bad("the finger strand must be free to move")
        if fl == al:
            kind = "R2_add"
            s1, s2, s3, s4 = n, n + 1, n + 2, n + 3
            Xt = [s1, s4, s2, s1]
            Yt = [s2, s4, s3, s3]
            for e in (s1, s2, s3, s4):
                evals[e] = (zero, None)
            drop_loop(fl, s1)
            mids = (s2, s4)
        else:
            ra = need_loop(al)
            kind = "MR2_add" if ra.fixed else "R2_add"
            a_arc, a_mid, b_mid, l = n, n + 1, n + 2, n + 3
            Xt = [l, a_mid, b_mid, a_arc]
            Yt = [b_mid, a_mid, l, a_arc]
            for e in (a_arc, a_mid, b_mid, l):
                evals[e] = (zero, None)
            drop_loop(fl, a_arc)
            drop_loop(al, b_mid)
            mids = (a_mid, b_mid)

    if kind != s.kind:
        raise _bad(f"site is a {kind} here, not {s.kind}")
    if var == "under":
        Xt, Yt = _rot1(Xt), _rot1(Yt)
    cxs[Xc] = [CLASSICAL, list(Xt)]
    cxs[Yc] = [CLASSICAL, list(Yt)]

    fixed = _remap_fixed(d.fixed, comp_moves)
    dg, dmap = _assemble(d, cxs, evals, loops, probs, fixed, _hints(d))
    if d.surface != PLANAR and poked is not None:
        if _poke_label_repair(d, dg, dmap, evals, cxs, span, poked):
            dg, dmap = _assemble(d, cxs, evals, loops, probs, fixed, _hints(d))
    bigons = [
        f for f in dg.faces
        if len(f) == 2 and {dg.edge_at(x) for x in f} == set(mids)
    ]
    inv = site(s.kind.replace("_add", "_remove"), face=min(bigons)[0])
    return dg, inv


def _poke_remove(d: Diagram, s: MoveSite):
    dt = s.get("face")
    f = d.face_of_dart.get(dt) if dt is not None else None
    if f is None or f[0] != dt or len(f) != 2:
        raise _bad("site must name a bigon by its least dart")
    p, q = f
    Xc, Yc = p.crossing, q.crossing
    if Xc == Yc:
        raise _bad("bigon sits on a single crossing")
    if (d.crossing_by_id[Xc].kind != CLASSICAL
            or d.crossing_by_id[Yc].kind != CLASSICAL):
        raise _bad("only classical bigons cancel")
    e1, e2 = d.edge_at(p), d.edge_at(q)
    if e1 == e2:
        raise _bad("degenerate bigon")
    pars = {}
    for e in (e1, e2):
        ds = d.edge_darts[e]
        if {x.crossing for x in ds} != {Xc, Yc}:
            raise _bad("bigon edges must join its two crossings")
        if ds[0].slot % 2 != ds[1].slot % 2:
            raise _bad("clasp bigons do not cancel")
        pars[e] = ds[0].slot % 2
    if set(pars.values()) != {0, 1}:
        raise _bad("bigon is not a poke pattern")
    if not label_is_zero(d.face_sum(f)):
        raise _bad("bigon face sum must be zero")
    fx1, fx2 = d.edge_by_id[e1].fixed, d.edge_by_id[e2].fixed
    if fx1 and fx2:
        raise _bad("both strands fixed; nothing may move")

    cut = _delete(d, {Xc, Yc})
    where = {}
    for (run, _v, ends), res in zip(cut.chains, cut.results):
        for e in run:
            where[e] = (res, ends)

    if fx1 or fx2:
        kind = "MR2_remove"
        finger_mid, across_mid = (e2, e1) if fx1 else (e1, e2)
    else:
        pinc = False
        for e in (e1, e2):
            _res, ends = where[e]
            if ends is not None:
                for x in ends:
                    if d.crossing_by_id[x.crossing].kind == PRECROSS:
                        pinc = True
        kind = "PR2_remove" if pinc else "R2_remove"
        finger_mid, across_mid = min(e1, e2), max(e1, e2)
    if kind != s.kind:
        raise _bad(f"site is a {kind} here, not {s.kind}")
    var = "over" if pars[finger_mid] == 1 else "under"

    dg, dmap = _assemble(d, cut.cxs, cut.evals, cut.loops, cut.probs,
                         cut.fixed, _hints(d))

    fres, f_ends = where[finger_mid]
    ares, a_ends = where[across_mid]
    addk = s.kind.replace("_remove", "_add")

    # Which chain end re-attaches where: the add surgery lays a fixed slot
    # pattern around each entering strand arc, so the end to poke from is
    # the one whose crossing still shows that pattern.  Reading two slots
    # past the entering arc distinguishes the two ends of either strand.
    def slot_after(x: Dart, k: int) -> int:
        m = d.mate(x)
        c = d.crossing_by_id[m.crossing]
        return c.edges[(m.slot + k) % 4]

    def finger_end() -> Dart:
        good = [
            x for x in f_ends
            if slot_after(x, 2) == finger_mid and slot_after(x, 3) == across_mid
        ]
        return good[0] if good else f_ends[0]

    def across_end() -> Dart:
        good = [
            x for x in a_ends
            if slot_after(x, 2) == across_mid and slot_after(x, 3) == finger_mid
        ]
        return good[0] if good else a_ends[0]

    if isinstance(fres, str) and isinstance(ares, str):
        inv = site(addk, finger_loop=fres, across_loop=ares, variant=var)
    elif isinstance(fres, str):
        inv = site(addk, finger_loop=fres, across=dmap(across_end()), variant=var)
    elif isinstance(ares, str):
        inv = site(addk, finger=dmap(finger_end()), across_loop=ares, variant=var)
    else:
        inv = site(addk, finger=dmap(finger_end()), across=dmap(across_end()),
                   variant=var)
    return dg, inv


# -------------------------------------------------------------- triangles

def _triangle_info(d: Diagram, f):
    if len(f) != 3:
        return None
    cids = [dt.crossing for dt in f]
    if len(set(cids)) != 3:
        return None
    sides = []
    for dt in f:
        e = d.edge_at(dt)
        sides.append((e, dt, d.mate(dt)))
    eids = [e for e, _, _ in sides]
    if len(set(eids)) != 3:
        return None
    for e, di, dj in sides:
        cs = {di.crossing, dj.crossing}
        if len(cs) != 2 or not cs <= set(cids):
            return None
    if not label_is_zero(d.face_sum(f)):
        return None

    kind_of = {cid: d.crossing_by_id[cid].kind for cid in cids}
    pcs = [cid for cid in cids if kind_of[cid] == PRECROSS]
    if len(pcs) > 1:
        return None
    fixed = {e: d.edge_by_id[e].fixed for e in eids}
    if sum(fixed.values()) == 3:
        return None

    def parities(e):
        _, di, dj = next(x for x in sides if x[0] == e)
        return {di.slot % 2, dj.slot % 2}

    if pcs:
        cp = pcs[0]
        third = [e for e, di, dj in sides if cp not in (di.crossing, dj.crossing)]
        if len(third) != 1:
            return None
        k = third[0]
        if any(fixed[e] for e in eids if e != k):
            return None
        ps = parities(k)
        if len(ps) != 1:
            return None
        if fixed[k]:
            mk = "MPR3"
        else:
            mk = "PR3" if ps == {1} else "PR3p"
        return {"kind": mk, "sides": sides}

    nf = sum(fixed.values())
    if nf == 2:
        mov = next(e for e in eids if not fixed[e])
        if len(parities(mov)) != 1:
            return None
        return {"kind": "HMR3", "sides": sides}
    wins = {e: 0 for e in eids}
    for e, di, dj in sides:
        for x in (di, dj):
            if x.slot % 2 == 1:
                wins[e] += 1
    if sorted(wins.values()) != [0, 1, 2]:
        return None
    return {"kind": "MR3" if nf == 1 else "R3", "sides": sides}


def _triangle_gauge(d: Diagram, sides) -> Dict[str, Label]:
    if d.surface == PLANAR:
        return {}
    z = zero_label(d.surface)
    cids = sorted({dt.crossing for _, dt, _ in sides} |
                  {dt.crossing for _, _, dt in sides}, key=natural_key)
    k: Dict[str, Label] = {cids[0]: z}
    for _ in range(3):
        for e, _di, _dj in sides:
            td = d.edge_darts[e]
            tail, head = td[0].crossing, td[1].crossing
            w = d.edge_by_id[e].label
            if tail in k and head not in k:
                k[head] = label_add(k[tail], label_neg(w))
            elif head in k and tail not in k:
                k[tail] = label_add(k[head], w)
    for e, _di, _dj in sides:
        td = d.edge_darts[e]
        w = d.edge_by_id[e].label
        res = label_add(w, label_add(k[td[1].crossing], label_neg(k[td[0].crossing])))
        if not label_is_zero(res):
            raise _bad("triangle labels do not gauge to zero")
    return k


def _triangle(d: Diagram, s: MoveSite):
    dt = s.get("face")
    f = d.face_of_dart.get(dt) if dt is not None else None
    if f is None or f[0] != dt:
        raise _bad("site must name the face by its least dart")
    info = _triangle_info(d, f)
    if info is None or info["kind"] != s.kind:
        raise _bad("face is not a triangle of this kind")
    sides = info["sides"]

    ks = _triangle_gauge(d, sides)
    z = zero_label(d.surface)

    def gauged_from(eid: int, u: Dart) -> Label:
        td = d.edge_darts[eid]
        w = label_add(
            d.edge_by_id[eid].label,
            label_add(ks.get(td[1].crossing, z), label_neg(ks.get(td[0].crossing, z))),
        )
        return w if u == td[0] else label_neg(w)

    cxs, evals, probs, loops = _base(d)
    for e, di, dj in sides:
        fi_d = Dart(di.crossing, (di.slot + 2) % 4)
        fj_d = Dart(dj.crossing, (dj.slot + 2) % 4)
        fi, fj = d.edge_at(fi_d), d.edge_at(fj_d)
        _set_slot(cxs, di, fj)
        _set_slot(cxs, fi_d, e)
        _set_slot(cxs, dj, fi)
        _set_slot(cxs, fj_d, e)
        evals[e] = (z, None)
        evals[fj] = (gauged_from(fj, fj_d), di)
        evals[fi] = (gauged_from(fi, fi_d), dj)

    dg, dmap = _assemble(d, cxs, evals, loops, probs, d.fixed, _hints(d))
    want = {e for e, _, _ in sides}
    cands = [
        g for g in dg.faces if len(g) == 3 and {dg.edge_at(x) for x in g} == want
    ]
    if not cands:
        raise _bad("flip produced no triangle back")
    return dg, site(s.kind, face=min(cands)[0])


# ------------------------------------------------------------- enumeration

def enumerate_moves(d: Diagram, kinds: Optional[Iterable[str]] = None
                    ) -> Tuple[MoveSite, ...]:
    """All sites present on the diagram, deterministically ordered."""
    want = None if kinds is None else set(kinds)
    out: List[MoveSite] = []

    def em(k, **kw):
        if want is None or k in want:
            out.append(site(k, **kw))

    half = Fraction(1, 2)
    for e in d.edges:
        if e.fixed:
            continue
        for tag in _KINK_EDGE_TAGS:
            em("R1_add", edge=e.id, variant=tag)
        for tag in ("ttab", "ttba"):
            em("PR1_add", edge=e.id, variant=tag, prob=half)
    for l in d.loops:
        if l.fixed:
            continue
        if d.surface == ANNULAR and l.cls not in (None, 0, 1, -1):
            continue
        for tag in _KINK_LOOP_TAGS:
            em("R1_add", loop=l.id, variant=tag)
        em("PR1_add", loop=l.id, variant="ttss", prob=half)

    for c in d.crossings:
        for sl in range(4):
            t = c.edges[sl]
            if t != c.edges[(sl + 1) % 4]:
                continue
            if d.edge_by_id[t].fixed:
                continue
            if not label_is_zero(d.edge_by_id[t].label):
                continue
            em("PR1_remove" if c.kind == PRECROSS else "R1_remove",
               crossing=c.id, slot=sl)

    for f in d.faces:
        for df in f:
            ef = d.edge_at(df)
            if d.edge_by_id[ef].fixed:
                continue
            for da in f:
                ea = d.edge_at(da)
                if ea == ef:
                    continue
                k = _poke_kind(d, ef, ea, d.edge_by_id[ea].fixed)
                for v in _POKE_VARIANTS:
                    em(k, finger=df, across=da, variant=v)

    nulls = [l for l in d.loops if _null_class(l.cls)]
    all_darts = sorted(d.darts)
    for l in nulls:
        if not l.fixed:
            for w in all_darts:
                k = _poke_kind(d, None, d.edge_at(w),
                               d.edge_by_id[d.edge_at(w)].fixed)
                for v in _POKE_VARIANTS:
                    em(k, finger_loop=l.id, across=w, variant=v)
            for l2 in nulls:
                if l2.id == l.id:
                    for v in _POKE_VARIANTS:
                        em("R2_add", finger_loop=l.id, across_loop=l.id, variant=v)
                else:
                    k = "MR2_add" if l2.fixed else "R2_add"
                    for v in _POKE_VARIANTS:
                        em(k, finger_loop=l.id, across_loop=l2.id, variant=v)
        for u in all_darts:
            ef = d.edge_at(u)
            if d.edge_by_id[ef].fixed:
                continue
            k = "MR2_add" if l.fixed else (
                "PR2_add" if _p_incident(d, ef) else "R2_add")
            for v in _POKE_VARIANTS:
                em(k, finger=u, across_loop=l.id, variant=v)

    for f in d.faces:
        if len(f) == 2:
            k = _bigon_kind(d, f)
            if k:
                em(k, face=f[0])
        elif len(f) == 3:
            info = _triangle_info(d, f)
            if info:
                em(info["kind"], face=f[0])

    out.sort(key=lambda x: (x.kind, x.text))
    return tuple(out)


def _bigon_kind(d: Diagram, f) -> Optional[str]:
    p, q = f
    Xc, Yc = p.crossing, q.crossing
    if Xc == Yc:
        return None
    if (d.crossing_by_id[Xc].kind != CLASSICAL
            or d.crossing_by_id[Yc].kind != CLASSICAL):
        return None
    e1, e2 = d.edge_at(p), d.edge_at(q)
    if e1 == e2:
        return None
    pars = set()
    for e in (e1, e2):
        ds = d.edge_darts[e]
        if {x.crossing for x in ds} != {Xc, Yc}:
            return None
        if ds[0].slot % 2 != ds[1].slot % 2:
            return None
        pars.add(ds[0].slot % 2)
    if pars != {0, 1}:
        return None
    if not label_is_zero(d.face_sum(f)):
        return None
    fx1, fx2 = d.edge_by_id[e1].fixed, d.edge_by_id[e2].fixed
    if fx1 and fx2:
        return None
    if fx1 or fx2:
        return "MR2_remove"
    for e in (e1, e2):
        for x in _strand_far_ends(d, e, (Xc, Yc)):
            if d.crossing_by_id[x.crossing].kind == PRECROSS:
                return "PR2_remove"
    return "R2_remove"


def _strand_far_ends(d: Diagram, eid: int, inner) -> List[Dart]:
    """First darts reached past the given crossings along eid's strand."""
    ends = []
    for start in d.edge_darts[eid]:
        cur = start
        hops = 0
        while cur.crossing in inner and hops <= len(d.edges) * 2:
            cur = d.mate(Dart(cur.crossing, (cur.slot + 2) % 4))
            hops += 1
        if cur.crossing not in inner:
            ends.append(cur)
    return ends


_APPLY = {
    "R1_add": _kink_add, "PR1_add": _kink_add,
    "R1_remove": _kink_remove, "PR1_remove": _kink_remove,
    "R2_add": _poke_add, "PR2_add": _poke_add, "MR2_add": _poke_add,
    "R2_remove": _poke_remove, "PR2_remove": _poke_remove,
    "MR2_remove": _poke_remove,
    "R3": _triangle, "PR3": _triangle, "PR3p": _triangle,
    "MR3": _triangle, "MPR3": _triangle, "HMR3": _triangle,
}


def apply_move(d: Diagram, s: MoveSite) -> Tuple[Diagram, MoveSite]:
    """Perform one move.  Returns the new diagram and the undo site."""
    if s.kind not in _APPLY:
        raise _bad(f"unknown move kind {s.kind!r}")
    return _APPLY[s.kind](d, s)


def scramble(d: Diagram, steps: int, seed: int,
             kinds: Optional[Iterable[str]] = None
             ) -> Tuple[Diagram, Tuple[MoveSite, ...]]:
    """Random walk through the move graph, reproducible from the seed.

    Each step picks uniformly among the kinds present, then uniformly
    among that kind's sites, so removals stay as likely as the much more
    numerous additions.
    """
    rng = random.Random(seed)
    cur = d
    log: List[MoveSite] = []
    for _ in range(steps):
        sites = enumerate_moves(cur, kinds)
        if not sites:
            break
        by: Dict[str, List[MoveSite]] = {}
        for st in sites:
            by.setdefault(st.kind, []).append(st)
        names = sorted(by)
        pick = by[names[rng.randrange(len(names))]]
        st = pick[rng.randrange(len(pick))]
        cur, _inv = apply_move(cur, st)
        log.append(st)
    return cur, tuple(log)


def catalog_text() -> str:
    return _CATALOG


_CATALOG = """\
Move catalog
============

Sites name a move kind plus bindings; str(site) round-trips through
parse_site.  Darts are written crossing.slot.  apply_move(d, site)
returns the rewritten diagram together with the site undoing the move.

Kink family (crossing count +1 / -1)
------------------------------------
R1_add    edge=E variant=ttab|ttba|attb|btta
          Curl a strand at edge E.  The tag spells the new crossing's
          slot pattern: t the kink loop, a the arc keeping id E (the
          reference end), b the freshly numbered arc.  ttab/ttba curl
          one chirality, attb/btta the other; within a chirality the
          two tags put the loop on opposite sides of the strand.
R1_add    loop=L variant=ttss|stts
          Curl a free loop into a one-crossing diagram.  On the annulus
          this needs |class| <= 1; on the torus any class works.
PR1_add   edge=E variant=ttab|ttba prob=P    (loop=L variant=ttss)
          Same surgery with a precrossing; P is the new resolution
          weight.  Only two edge tags: with no over strand the other
          two patterns are rotations of these.
R1_remove crossing=C slot=S
          Cancel the kink loop occupying slots S, S+1 of C.  The loop
          label must be zero.  PR1_remove is the precrossing version
          and forgets its weight.

Poke family (crossing count +2 / -2)
------------------------------------
R2_add    finger=D across=D' variant=over|under
          Push the edge at dart D across the edge at D'; both darts
          must sit in one face.  over puts the finger on top.
R2_add    finger_loop=L across=D' | finger=D across_loop=L |
          finger_loop=L across_loop=L' | finger_loop=L across_loop=L
          Null free loops poke across strands, other null loops, or
          themselves (the last yields the standard curl-curl picture).
PR2_add / MR2_add
          Same surgery, classified by the strands: across a fixed
          strand it is MR2; when a poked strand carries a precrossing
          at either end it is PR2.  Fixed strands never finger.
R2_remove face=D
          Cancel the bigon whose least dart is D.  Both crossings must
          be classical, the two boundary edges must run crossing to
          crossing with pure over/under parity (clasps stay), and the
          face sum must vanish.  PR2_remove / MR2_remove are the same
          pattern classified as above.

Triangle family (crossing count 0)
----------------------------------
R3        face=D
          Slide the triangle whose least dart is D to the other side.
          Needs three distinct classical crossings, three distinct side
          edges, zero face sum, and an acyclic over/under pattern.
PR3/PR3p  face=D
          One precrossing on the triangle; the third strand passes over
          (PR3) or under (PR3p) both classical crossings.
MR3       face=D   one side fixed, all classical, acyclic.
MPR3      face=D   precrossing pair of moving strands slides across a
          fixed extremal strand.
HMR3      face=D   a moving extremal strand slides across the crossing
          of two fixed strands.

All adds place zero labels on new arcs and re-anchor the boundary marks
afterwards; when every face sum is zero the marks are pinned to the
least dart, matching the canonical form.
"""
