"""Canonical forms.

Two layers:

* tree gauge: edge labels are only defined up to vertex-star moves (the
  discrete version of sliding the reference ray).  Zeroing the labels on a
  canonical spanning tree of each piece picks a unique representative.

* relabeling: a deterministic traversal from a start dart renames
  crossings, slots and edges; minimizing the serialized text over all
  start darts gives a certified canonical form at every size.

Labels have a direction convention: an edge departs along its minimal
dart.  Renaming darts can flip that reference, so every relabeling
transports label signs explicitly.  Orientation seeds are auxiliary data
and do not enter the canonical form.
"""

from __future__ import annotations

from typing import Dict, List, Optional, Tuple

from .diagram import (
    ANNULAR,
    CLASSICAL,
    PLANAR,
    ComponentId,
    PseudoLinkError,
    Crossing,
    Dart,
    Diagram,
    Edge,
    FixedPart,
    FreeLoop,
    Label,
    Marks,
    build_diagram,
    canonical_class,
    label_add,
    label_is_zero,
    label_neg,
    natural_key,
    rotate,
)


def _scale(k: Label, s: int) -> Label:
    if k is None:
        return None
    if isinstance(k, tuple):
        return (k[0] * s, k[1] * s)
    return k * s


def relabel(
    d: Diagram,
    cmap: Dict[str, str],
    emap: Dict[int, int],
    rot: Optional[Dict[str, int]] = None,
    lmap: Optional[Dict[str, str]] = None,
) -> Diagram:
    """Rename crossings/edges/loops, optionally rotating crossing tuples.

    rot[c] = r moves the content of old slot (s+r)%4 to new slot s.  Label
    signs are transported so the reference-dart semantics is preserved,
    and precrossing probabilities follow odd rotations of the stored
    tuple.
    """
    rot = rot or {}
    lmap = lmap or {}

    # the stored tuple gets renormalized after renaming, so the effective
    # rotation is the requested one plus whatever normalization adds
    new_crossings = []
    total: Dict[str, int] = {}
    for c in d.crossings:
        r = rot.get(c.id, 0)
        if c.kind == CLASSICAL and r % 2:
            raise PseudoLinkError(
                "INVALID_INPUT", f"odd rotation at classical crossing {c.id} is not a relabeling"
            )
        norm = Crossing(cmap[c.id], c.kind, tuple(emap[e] for e in rotate(c.edges, r))).normalized()
        total[c.id] = next(
            k for k in range(4) if tuple(emap[e] for e in rotate(c.edges, k)) == norm.edges
        )
        new_crossings.append(norm)

    def dart_map(dt: Dart) -> Dart:
        return Dart(cmap[dt.crossing], (dt.slot - total[dt.crossing]) % 4)

    # per-edge label sign transport
    sign: Dict[int, int] = {}
    for eid, darts in d.edge_darts.items():
        mapped = sorted((dart_map(x) for x in darts))
        sign[eid] = 1 if dart_map(darts[0]) == mapped[0] else -1
    new_edges = [Edge(emap[e.id], _scale(e.label, sign.get(e.id, 1)), e.fixed) for e in d.edges]

    new_loops = [FreeLoop(lmap.get(l.id, l.id), l.cls, l.fixed) for l in d.loops]

    def comp_map(ref: ComponentId) -> ComponentId:
        if isinstance(ref, int):
            return min(emap[e] for e in d.component_edges(d.resolve_component(ref)))
        return lmap.get(ref, ref)

    fixed = d.fixed
    if fixed.kind == "O":
        fixed = FixedPart("O", o=comp_map(fixed.o))
    elif fixed.kind == "H":
        fixed = FixedPart("H", m=comp_map(fixed.m), l=comp_map(fixed.l))

    marks = d.marks
    if marks is not None:
        marks = Marks(dart_map(marks.inner), dart_map(marks.outer))

    seeds = tuple(
        (comp_map(cid), emap[eid], dart_map(to)) for cid, eid, to in d.orient_seeds
    )
    probs = []
    for cid, p in d.probs:
        if total.get(cid, 0) % 2:
            p = 1 - p
        probs.append((cmap[cid], p))

    return build_diagram(d.surface, new_crossings, new_edges, new_loops, fixed, marks, seeds, probs)


# ---------------------------------------------------------------------------
# tree gauge


def tree_gauge(d: Diagram) -> Diagram:
    """Gauge-normalize labels: zero on a canonical spanning tree per piece."""
    if d.surface == PLANAR or not d.crossings:
        return d

    head: Dict[int, str] = {}
    tail: Dict[int, str] = {}
    for eid, darts in d.edge_darts.items():
        tail[eid] = darts[0].crossing
        head[eid] = darts[1].crossing

    # star move with coefficient k at crossing v sends w(e) to
    # w(e) + k*[v is head] - k*[v is tail]; self-incidences cancel.
    # Solving tree edges top-down fixes every coefficient.
    k: Dict[str, Label] = {}
    for piece in d.pieces:
        root = piece[0]
        k[root] = (0, 0) if d.surface == "toroidal" else 0
        in_piece = set(piece)
        piece_edges = sorted(e for e in d.edge_darts if tail[e] in in_piece)
        frontier = [root]
        while frontier:
            nxt = []
            for c in frontier:
                for eid in piece_edges:
                    if tail[eid] != c and head[eid] != c:
                        continue
                    other = head[eid] if tail[eid] == c else tail[eid]
                    if other in k or other == c:
                        continue
                    w = d.edge_by_id[eid].label
                    if head[eid] == other:
                        # 0 = w + k[other] - k[c]
                        k[other] = label_add(k[c], label_neg(w))
                    else:
                        # 0 = w + k[c] - k[other]
                        k[other] = label_add(w, k[c])
                    nxt.append(other)
            frontier = nxt

    new_edges = []
    for e in d.edges:
        if e.id not in head:
            new_edges.append(e)
            continue
        w = label_add(e.label, label_add(k[head[e.id]], label_neg(k[tail[e.id]])))
        new_edges.append(Edge(e.id, w, e.fixed))
    return build_diagram(
        d.surface, d.crossings, new_edges, d.loops, d.fixed, d.marks, d.orient_seeds, d.probs
    )


# ---------------------------------------------------------------------------
# canonical form


def _traverse(d: Diagram, start: Dart) -> Tuple[Dict[str, str], Dict[str, int], Tuple[str, ...]]:
    """Deterministic relabeling of the start dart's piece.

    Returns (crossing map old->new, rotation per old crossing, visit order).
    """
    cmap: Dict[str, str] = {}
    rot: Dict[str, int] = {}
    order: List[str] = []
    queue = [start]
    qi = 0
    while qi < len(queue):
        dt = queue[qi]
        qi += 1
        c = dt.crossing
        if c in cmap:
            continue
        cmap[c] = f"c{len(order) + 1}"
        order.append(c)
        kind = d.crossing_by_id[c].kind
        if kind == CLASSICAL:
            rot[c] = dt.slot if dt.slot % 2 == 0 else dt.slot - 1
        else:
            rot[c] = dt.slot
        for s in range(4):
            queue.append(d.mate(Dart(c, (rot[c] + s) % 4)))
    return cmap, rot, tuple(order)


def _piece_candidate(
    d: Diagram, start: Dart, omit_marks: bool = False
) -> Tuple[str, Dict[str, str], Dict[str, int], Dict[int, int]]:
    cmap, rot, order = _traverse(d, start)
    emap: Dict[int, int] = {}
    for c in order:
        cr = d.crossing_by_id[c]
        for s in range(4):
            eid = cr.edges[(rot[c] + s) % 4]
            if eid not in emap:
                emap[eid] = len(emap) + 1

    crossings = []
    total: Dict[str, int] = {}
    for c in order:
        cr = d.crossing_by_id[c]
        norm = Crossing(cmap[c], cr.kind, tuple(emap[e] for e in rotate(cr.edges, rot[c]))).normalized()
        total[c] = next(
            k for k in range(4) if tuple(emap[e] for e in rotate(cr.edges, k)) == norm.edges
        )
        crossings.append(norm)

    def dart_map(dt: Dart) -> Dart:
        return Dart(cmap[dt.crossing], (dt.slot - total[dt.crossing]) % 4)

    edges = []
    fixed_lines = []
    for eid, new_id in emap.items():
        darts = d.edge_darts[eid]
        mapped = sorted(dart_map(x) for x in darts)
        s = 1 if dart_map(darts[0]) == mapped[0] else -1
        e = d.edge_by_id[eid]
        edges.append(Edge(new_id, _scale(e.label, s), False))
        if e.fixed:
            fixed_lines.append(new_id)
    probs = []
    for cid, p in d.probs:
        if cid in cmap:
            probs.append((cmap[cid], 1 - p if total[cid] % 2 else p))

    piece = build_diagram(d.surface, crossings, edges, (), FixedPart(), None, (), probs)
    piece = tree_gauge(piece)

    lines = []
    for c in sorted(piece.crossings, key=lambda c: natural_key(c.id)):
        tup = ",".join(str(e) for e in c.edges)
        lines.append(f"crossing {c.kind} {c.id} ({tup})")
    for e in piece.edges:
        if e.label is not None and e.label != 0 and e.label != (0, 0):
            w = f"({e.label[0]},{e.label[1]})" if isinstance(e.label, tuple) else str(e.label)
            lines.append(f"edge {e.id} w={w}")
    for new_id in sorted(fixed_lines):
        lines.append(f"edge {new_id} fixed")
    if d.marks is not None and not omit_marks:
        # the face is the datum, not the dart: serialize its minimal image
        for side, dt in (("inner", d.marks.inner), ("outer", d.marks.outer)):
            if dt.crossing in cmap:
                lines.append(f"face {side} {min(dart_map(x) for x in d.face_of_dart[dt])}")
    for cid, p in piece.probs:
        lines.append(f"prob {cid} {p.numerator}/{p.denominator}")
    return "\n".join(lines), cmap, rot, emap


def marks_are_gauge(d: Diagram) -> bool:
    """True when the boundary marks carry no isotopy information.

    With every face sum zero the reference ray can be slid past the whole
    diagram, so which face it starts and ends in is a choice, not data.
    Canonical forms pin that choice; comparisons must not see it.
    """
    if d.surface != ANNULAR or d.marks is None or not d.crossings:
        return False
    return all(label_is_zero(d.face_sum(f)) for f in d.faces)


def canonical_form(d: Diagram) -> str:
    """Certified canonical text key; ignores orientation seeds."""
    pin = marks_are_gauge(d)
    # canonicalize each piece independently
    piece_results = []
    for piece in d.pieces:
        best = None
        for c in piece:
            for s in range(4):
                text, cmap, rot, emap = _piece_candidate(d, Dart(c, s), omit_marks=pin)
                if best is None or text < best[0]:
                    best = (text, cmap, rot, emap)
        piece_results.append(best)

    # deterministic piece order, then one global rebuild
    piece_results.sort(key=lambda b: b[0])
    cmap: Dict[str, str] = {}
    rot: Dict[str, int] = {}
    emap: Dict[int, int] = {}
    coff = 0
    eoff = 0
    for text, pc, pr, pe in piece_results:
        for old, new in pc.items():
            cmap[old] = f"c{int(new[1:]) + coff}"
        rot.update(pr)
        for old, new in pe.items():
            emap[old] = new + eoff
        coff += len(pc)
        eoff += len(pe)

    lmap = {}
    loop_order = sorted(
        d.loops, key=lambda l: (not l.fixed, _loop_sort_key(l.cls), l.id)
    )
    for i, l in enumerate(loop_order, start=1):
        lmap[l.id] = f"L{i}"

    base = build_diagram(
        d.surface,
        d.crossings,
        d.edges,
        tuple(FreeLoop(l.id, canonical_class(l.cls), l.fixed) for l in d.loops),
        d.fixed,
        d.marks,
        (),  # orientation dropped
        d.probs,
    )
    out = relabel(base, cmap, emap, rot, lmap)
    out = tree_gauge(out)
    if out.marks is not None and not pin:
        fod = out.face_of_dart
        out = build_diagram(
            out.surface,
            out.crossings,
            out.edges,
            out.loops,
            out.fixed,
            Marks(min(fod[out.marks.inner]), min(fod[out.marks.outer])),
            (),
            out.probs,
        )
    if pin:
        anchor = min(out.darts)
        out = build_diagram(
            out.surface,
            out.crossings,
            out.edges,
            out.loops,
            out.fixed,
            Marks(anchor, anchor),
            (),
            out.probs,
        )
    from .textio import serialize_diagram

    return serialize_diagram(out)


def _loop_sort_key(cls: Label):
    if cls is None:
        return (0, 0)
    if isinstance(cls, tuple):
        return cls
    return (cls, 0)


def canonical_diagram(d: Diagram) -> Diagram:
    """The diagram whose serialization is canonical_form(d)."""
    from .textio import parse_diagram

    return parse_diagram(canonical_form(d))
