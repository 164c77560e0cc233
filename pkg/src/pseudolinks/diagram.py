"""Extended PD-code model for pseudo link diagrams on the plane, annulus, torus.

A diagram is a combinatorial map: crossings with four counterclockwise
slots (0..3), edges joining slot pairs, plus crossing-free loops.  Classical
crossings keep the under-strand on slots {0,2}.  Precrossings carry no
over/under data and are stored in the lexicographically minimal rotation
of their slot tuple.

Surface data is carried by edge labels: nothing for planar diagrams, an
integer winding label for annular ones, an integer pair for toroidal ones,
together with two marked faces (annular only) standing for the puncture
and the outer boundary.  Validation enforces the face-sum conditions that
make the labels a consistent homology bookkeeping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, FrozenSet, List, NamedTuple, Optional, Sequence, Tuple, Union

PLANAR = "planar"
ANNULAR = "annular"
TOROIDAL = "toroidal"
SURFACES = (PLANAR, ANNULAR, TOROIDAL)

CLASSICAL = "X"
PRECROSS = "P"

Label = Union[None, int, Tuple[int, int]]
ComponentId = Union[int, str]  # minimal edge id, or loop id


class PseudoLinkError(Exception):
    """Library error with a stable machine-readable code."""

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


class Dart(NamedTuple):
    crossing: str
    slot: int

    def __str__(self) -> str:
        return f"{self.crossing}.{self.slot}"


def rotate(tup: Tuple[int, int, int, int], k: int) -> Tuple[int, int, int, int]:
    k %= 4
    return tup[k:] + tup[:k]


def min_rotation(tup: Tuple[int, int, int, int]) -> Tuple[int, int, int, int]:
    return min(rotate(tup, k) for k in range(4))


def min_even_rotation(tup: Tuple[int, int, int, int]) -> Tuple[int, int, int, int]:
    return min(tup, rotate(tup, 2))


@dataclass(frozen=True)
class Crossing:
    id: str
    kind: str  # CLASSICAL or PRECROSS
    edges: Tuple[int, int, int, int]  # counterclockwise slots 0..3

    def normalized(self) -> "Crossing":
        if self.kind == PRECROSS:
            return Crossing(self.id, self.kind, min_rotation(self.edges))
        return Crossing(self.id, self.kind, min_even_rotation(self.edges))


@dataclass(frozen=True)
class Edge:
    id: int
    label: Label = None
    fixed: bool = False


@dataclass(frozen=True)
class FreeLoop:
    id: str
    cls: Label = None  # None planar, int annular, pair toroidal
    fixed: bool = False


@dataclass(frozen=True)
class Marks:
    inner: Dart
    outer: Dart


@dataclass(frozen=True)
class FixedPart:
    kind: Optional[str] = None  # None, "O", "H"
    o: Optional[ComponentId] = None
    m: Optional[ComponentId] = None
    l: Optional[ComponentId] = None


@dataclass(frozen=True)
class Violation:
    code: str
    locus: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: Tuple[Violation, ...]
    face_count: int
    euler_char: int


@dataclass(frozen=True)
class WritheResult:
    total: int
    moving_self: int


def zero_label(surface: str) -> Label:
    if surface == PLANAR:
        return None
    if surface == ANNULAR:
        return 0
    return (0, 0)


def label_add(a: Label, b: Label) -> Label:
    if a is None:
        return None
    if isinstance(a, tuple):
        return (a[0] + b[0], a[1] + b[1])
    return a + b


def label_neg(a: Label) -> Label:
    if a is None:
        return None
    if isinstance(a, tuple):
        return (-a[0], -a[1])
    return -a


def label_is_zero(a: Label) -> bool:
    return a is None or a == 0 or a == (0, 0)


def canonical_class(a: Label) -> Label:
    """Canonical sign representative: the lexicographically larger of v, -v."""
    if a is None or a == 0 or a == (0, 0):
        return a
    n = label_neg(a)
    return a if a > n else n


@dataclass(frozen=True)
class Diagram:
    surface: str
    crossings: Tuple[Crossing, ...]
    edges: Tuple[Edge, ...]
    loops: Tuple[FreeLoop, ...]
    fixed: FixedPart = FixedPart()
    marks: Optional[Marks] = None
    orient_seeds: Tuple[Tuple[ComponentId, int, Dart], ...] = ()
    probs: Tuple[Tuple[str, Fraction], ...] = ()

    # ---- lookups ------------------------------------------------------

    @cached_property
    def crossing_by_id(self) -> Dict[str, Crossing]:
        return {c.id: c for c in self.crossings}

    @cached_property
    def edge_by_id(self) -> Dict[int, Edge]:
        return {e.id: e for e in self.edges}

    @cached_property
    def loop_by_id(self) -> Dict[str, FreeLoop]:
        return {l.id: l for l in self.loops}

    @cached_property
    def prob_map(self) -> Dict[str, Fraction]:
        return dict(self.probs)

    @cached_property
    def edge_darts(self) -> Dict[int, Tuple[Dart, ...]]:
        """Edge id -> the darts (crossing, slot) where it is attached."""
        out: Dict[int, List[Dart]] = {}
        for c in self.crossings:
            for s, eid in enumerate(c.edges):
                out.setdefault(eid, []).append(Dart(c.id, s))
        return {eid: tuple(sorted(ds)) for eid, ds in out.items()}

    @cached_property
    def darts(self) -> Tuple[Dart, ...]:
        return tuple(Dart(c.id, s) for c in self.crossings for s in range(4))

    def edge_at(self, d: Dart) -> int:
        return self.crossing_by_id[d.crossing].edges[d.slot]

    def mate(self, d: Dart) -> Dart:
        """The other dart of the same edge (alpha involution)."""
        ds = self.edge_darts[self.edge_at(d)]
        if len(ds) != 2:
            raise PseudoLinkError("INVALID_INPUT", f"edge {self.edge_at(d)} not paired")
        return ds[1] if ds[0] == d else ds[0]

    def next_id(self) -> int:
        return max((e.id for e in self.edges), default=0) + 1

    def next_crossing_id(self) -> str:
        best = 0
        for c in self.crossings:
            if c.id[0] == "c" and c.id[1:].isdigit():
                best = max(best, int(c.id[1:]))
        return f"c{best + 1}"

    def next_loop_id(self) -> str:
        best = 0
        for l in self.loops:
            if l.id[0] == "L" and l.id[1:].isdigit():
                best = max(best, int(l.id[1:]))
        return f"L{best + 1}"

    def reference_dart(self, eid: int) -> Dart:
        """Orientation anchor: the edge departs along its minimal dart."""
        return self.edge_darts[eid][0]

    def has_precrossings(self) -> bool:
        return any(c.kind == PRECROSS for c in self.crossings)

    def precrossings(self) -> Tuple[str, ...]:
        return tuple(c.id for c in self.crossings if c.kind == PRECROSS)

    # ---- strands ------------------------------------------------------

    def strand_next(self, d: Dart) -> Dart:
        """Follow the strand out of the crossing: slot i leaves via i+2."""
        return Dart(d.crossing, (d.slot + 2) % 4)

    @cached_property
    def component_of_edge(self) -> Dict[int, ComponentId]:
        """Edge id -> minimal edge id of its closed strand."""
        comp: Dict[int, ComponentId] = {}
        for start in sorted(self.edge_darts):
            if start in comp:
                continue
            members = []
            eid, dart = start, self.edge_darts[start][0]
            while True:
                members.append(eid)
                out = self.strand_next(self.mate(dart))
                eid, dart = self.edge_at(out), out
                if eid == start and dart == self.edge_darts[start][0]:
                    break
            root = min(members)
            for m in members:
                comp[m] = root
        return comp

    @cached_property
    def components(self) -> Tuple[ComponentId, ...]:
        ids = sorted(set(self.component_of_edge.values()))
        return tuple(ids) + tuple(l.id for l in self.loops)

    def component_edges(self, cid: ComponentId) -> Tuple[int, ...]:
        return tuple(sorted(e for e, c in self.component_of_edge.items() if c == cid))

    @cached_property
    def fixed_component_ids(self) -> FrozenSet[ComponentId]:
        out = set()
        if self.fixed.kind == "O":
            out.add(self.resolve_component(self.fixed.o))
        elif self.fixed.kind == "H":
            out.add(self.resolve_component(self.fixed.m))
            out.add(self.resolve_component(self.fixed.l))
        for l in self.loops:
            if l.fixed:
                out.add(l.id)
        return frozenset(out)

    def resolve_component(self, ref: ComponentId) -> ComponentId:
        """Map an edge id or loop id to its component id."""
        if isinstance(ref, int):
            if ref not in self.component_of_edge:
                raise PseudoLinkError("INVALID_INPUT", f"unknown edge {ref}")
            return self.component_of_edge[ref]
        if ref in self.loop_by_id:
            return ref
        raise PseudoLinkError("INVALID_INPUT", f"unknown component {ref}")

    def is_fixed_component(self, cid: ComponentId) -> bool:
        return cid in self.fixed_component_ids

    # ---- faces --------------------------------------------------------

    @cached_property
    def faces(self) -> Tuple[Tuple[Dart, ...], ...]:
        """Face orbits of phi = sigma o alpha; each named by its minimal dart.

        A face orbit lists the darts the boundary walk departs from: cross
        the edge at the current dart, then turn counterclockwise once.
        """
        seen = set()
        out: List[Tuple[Dart, ...]] = []
        for d0 in self.darts:
            if d0 in seen:
                continue
            orbit = []
            d = d0
            while d not in seen:
                seen.add(d)
                orbit.append(d)
                m = self.mate(d)
                d = Dart(m.crossing, (m.slot + 1) % 4)
            k = orbit.index(min(orbit))
            out.append(tuple(orbit[k:] + orbit[:k]))
        return tuple(sorted(out))

    @cached_property
    def face_of_dart(self) -> Dict[Dart, Tuple[Dart, ...]]:
        return {d: f for f in self.faces for d in f}

    def face_sum(self, face: Tuple[Dart, ...]) -> Label:
        """Signed label sum around a face; + when departing the reference dart."""
        total = zero_label(self.surface)
        for d in face:
            e = self.edge_at(d)
            w = self.edge_by_id[e].label
            if w is None:
                return None
            if d == self.reference_dart(e):
                total = label_add(total, w)
            else:
                total = label_add(total, label_neg(w))
        return total

    # ---- pieces (connected components of the crossing map) -----------

    @cached_property
    def pieces(self) -> Tuple[Tuple[str, ...], ...]:
        """Connected groups of crossing ids (edges as adjacency)."""
        adj: Dict[str, set] = {c.id: set() for c in self.crossings}
        for ds in self.edge_darts.values():
            if len(ds) == 2:
                adj[ds[0].crossing].add(ds[1].crossing)
                adj[ds[1].crossing].add(ds[0].crossing)
        seen = set()
        out = []
        for c in sorted(adj):
            if c in seen:
                continue
            stack, group = [c], []
            while stack:
                x = stack.pop()
                if x in seen:
                    continue
                seen.add(x)
                group.append(x)
                stack.extend(adj[x] - seen)
            out.append(tuple(sorted(group)))
        return tuple(out)

    def piece_of_crossing(self) -> Dict[str, int]:
        return {c: i for i, p in enumerate(self.pieces) for c in p}


# ---------------------------------------------------------------------------
# construction


def build_diagram(
    surface: str,
    crossings: Sequence[Crossing],
    edges: Sequence[Edge],
    loops: Sequence[FreeLoop] = (),
    fixed: FixedPart = FixedPart(),
    marks: Optional[Marks] = None,
    orient_seeds: Sequence[Tuple[ComponentId, int, Dart]] = (),
    probs: Sequence[Tuple[str, Fraction]] = (),
) -> Diagram:
    """Normalize and assemble a Diagram.

    Precrossing tuples are rotated to their minimal form, classical tuples
    to their minimal even rotation; fixed flags on edges are derived from
    the fixed part.  No topological validation happens here.
    """
    crossings = tuple(sorted((c.normalized() for c in crossings), key=lambda c: natural_key(c.id)))
    # labels and loop classes always carry the surface's shape
    def _shape(x: Label) -> Label:
        return zero_label(surface) if x is None or surface == PLANAR else x

    edges = tuple(
        Edge(e.id, _shape(e.label), e.fixed) for e in sorted(edges, key=lambda e: e.id)
    )
    loops = tuple(
        FreeLoop(l.id, _shape(l.cls), l.fixed)
        for l in sorted(loops, key=lambda l: natural_key(l.id))
    )
    d = Diagram(
        surface=surface,
        crossings=crossings,
        edges=edges,
        loops=loops,
        fixed=fixed,
        marks=marks,
        orient_seeds=tuple(sorted(orient_seeds, key=lambda t: str(t[0]))),
        probs=tuple(sorted(probs)),
    )
    if fixed.kind is None:
        if any(l.fixed for l in loops) or any(e.fixed for e in edges):
            d = Diagram(
                surface=surface,
                crossings=crossings,
                edges=tuple(Edge(e.id, e.label, False) for e in edges),
                loops=tuple(FreeLoop(l.id, l.cls, False) for l in loops),
                fixed=fixed,
                marks=marks,
                orient_seeds=d.orient_seeds,
                probs=d.probs,
            )
        return d
    # re-derive fixed flags from component membership
    fixed_ids = set()
    try:
        if fixed.kind == "O":
            fixed_ids.add(d.resolve_component(fixed.o))
        elif fixed.kind == "H":
            fixed_ids.add(d.resolve_component(fixed.m))
            fixed_ids.add(d.resolve_component(fixed.l))
    except PseudoLinkError:
        return d  # validation will flag the dangling reference
    new_edges = tuple(
        Edge(e.id, e.label, d.component_of_edge.get(e.id) in fixed_ids) for e in edges
    )
    new_loops = tuple(FreeLoop(l.id, l.cls, l.id in fixed_ids) for l in loops)
    return Diagram(
        surface=surface,
        crossings=crossings,
        edges=new_edges,
        loops=new_loops,
        fixed=fixed,
        marks=marks,
        orient_seeds=d.orient_seeds,
        probs=d.probs,
    )


def natural_key(token: str):
    """Sort c2 before c10."""
    head = token.rstrip("0123456789")
    tail = token[len(head):]
    return (head, int(tail) if tail else -1)


# ---------------------------------------------------------------------------
# queries


def trace_faces(d: Diagram) -> Tuple[Tuple[Dart, ...], ...]:
    return d.faces


def components(d: Diagram) -> Tuple[Tuple[ComponentId, bool], ...]:
    """All components with their fixed flags, strand components first."""
    return tuple((cid, d.is_fixed_component(cid)) for cid in d.components)


def homology_class(d: Diagram, cid: ComponentId) -> Label:
    """Component homology class with canonical sign."""
    if d.surface == PLANAR:
        d.resolve_component(cid)
        return 0
    if isinstance(cid, str) and cid in d.loop_by_id:
        return canonical_class(d.loop_by_id[cid].cls)
    if cid not in d.component_of_edge.values():
        cid = d.resolve_component(cid)
    total = zero_label(d.surface)
    for eid, d1, forward in walk_component(d, cid):
        w = d.edge_by_id[eid].label
        total = label_add(total, w if forward else label_neg(w))
    return canonical_class(total)


def walk_component(d: Diagram, cid: ComponentId):
    """Yield (edge, entry dart, traversed-along-reference) along the strand."""
    start = min(d.component_edges(cid))
    eid = start
    dart = d.edge_darts[eid][0]  # depart via the reference dart
    while True:
        yield eid, dart, dart == d.reference_dart(eid)
        arrive = d.mate(dart)
        out = d.strand_next(arrive)
        eid = d.edge_at(out)
        dart = out
        if eid == start and dart == d.edge_darts[start][0]:
            return


# ---------------------------------------------------------------------------
# validation


def validate(d: Diagram, strict: bool = False) -> ValidationReport:
    v: List[Violation] = []

    if d.surface not in SURFACES:
        v.append(Violation("INVALID_INPUT", d.surface, "unknown surface"))
        return ValidationReport(False, tuple(v), 0, 0)

    # edge pairing
    counts: Dict[int, int] = {}
    for c in d.crossings:
        if len(c.edges) != 4:
            v.append(Violation("FACE_TRACE", c.id, "crossing is not quadrivalent"))
        for eid in c.edges:
            counts[eid] = counts.get(eid, 0) + 1
    declared = {e.id for e in d.edges}
    for eid, n in sorted(counts.items()):
        if n != 2:
            v.append(Violation("EDGE_PAIRING", str(eid), f"edge occurs {n} times, expected 2"))
        if eid not in declared:
            v.append(Violation("EDGE_PAIRING", str(eid), "attached edge has no declaration"))
    for e in d.edges:
        if e.id not in counts:
            v.append(Violation("EDGE_PAIRING", str(e.id), "declared edge not attached to any crossing"))
    if any(x.code == "EDGE_PAIRING" or x.code == "FACE_TRACE" for x in v):
        return ValidationReport(False, tuple(v), 0, 0)

    # label domain checks
    for e in d.edges:
        if d.surface == PLANAR and e.label is not None:
            v.append(Violation("LABEL_FACE_SUM", str(e.id), "planar edges carry no labels"))
        if d.surface == ANNULAR and not isinstance(e.label, int):
            v.append(Violation("LABEL_FACE_SUM", str(e.id), "annular edge label must be an integer"))
        if d.surface == TOROIDAL and not (isinstance(e.label, tuple) and len(e.label) == 2):
            v.append(Violation("LABEL_FACE_SUM", str(e.id), "toroidal edge label must be a pair"))
    for l in d.loops:
        want = (
            l.cls is None or l.cls == 0
            if d.surface == PLANAR
            else isinstance(l.cls, int)
            if d.surface == ANNULAR
            else isinstance(l.cls, tuple) and len(l.cls) == 2
        )
        if not want:
            v.append(Violation("LABEL_FACE_SUM", l.id, "loop class does not match surface"))
    if v:
        return ValidationReport(False, tuple(v), len(d.faces), 0)

    faces = d.faces
    face_count = len(faces)
    euler = len(d.crossings) - len(d.edge_darts) + face_count if d.crossings else 0

    # per-piece Euler characteristic
    piece_idx = d.piece_of_crossing()
    piece_data: Dict[int, List[int]] = {}
    for i, piece in enumerate(d.pieces):
        vs = len(piece)
        es = sum(1 for ds in d.edge_darts.values() if ds[0].crossing in piece)
        fs = sum(1 for f in faces if f[0].crossing in piece)
        chi = vs - es + fs
        piece_data[i] = [vs, es, fs, chi]
        if d.surface in (PLANAR, ANNULAR) and chi != 2:
            v.append(Violation("EULER_CHAR", piece[0], f"piece has Euler characteristic {chi}, expected 2"))
        if d.surface == TOROIDAL and chi not in (0, 2):
            v.append(Violation("EULER_CHAR", piece[0], f"piece has Euler characteristic {chi}, expected 0 or 2"))
    if d.surface == TOROIDAL:
        filling = [i for i, pd_ in piece_data.items() if pd_[3] == 0]
        if len(filling) > 1:
            v.append(Violation("EULER_CHAR", d.pieces[filling[1]][0], "at most one piece can fill the torus"))

    # face-sum conditions
    if d.surface == ANNULAR:
        _validate_annular_sums(d, faces, piece_idx, v)
    elif d.surface == TOROIDAL:
        _validate_toroidal_sums(d, faces, piece_idx, piece_data, v, strict)

    _validate_fixed(d, v)

    return ValidationReport(not v, tuple(v), face_count, euler)


def _validate_annular_sums(d, faces, piece_idx, v):
    sums = {f: d.face_sum(f) for f in faces}
    by_piece: Dict[int, List[Tuple[Tuple[Dart, ...], int]]] = {}
    for f, s in sums.items():
        by_piece.setdefault(piece_idx[f[0].crossing], []).append((f, s))
    plus_faces, minus_faces = [], []
    for i, entries in by_piece.items():
        nz = [(f, s) for f, s in entries if s != 0]
        vals = sorted(s for _, s in nz)
        if nz and vals != [-1, 1]:
            v.append(
                Violation("LABEL_FACE_SUM", str(nz[0][0][0]),
                          f"piece face sums {vals} are not a +1/-1 pair"))
            continue
        for f, s in nz:
            (plus_faces if s > 0 else minus_faces).append(f)

    if d.crossings:
        if d.marks is None:
            v.append(Violation("MARK_MISSING", "-", "annular diagram with crossings needs face marks"))
            return
        for name, dart in (("inner", d.marks.inner), ("outer", d.marks.outer)):
            if dart.crossing not in d.crossing_by_id or not 0 <= dart.slot < 4:
                v.append(Violation("MARK_MISSING", str(dart), f"{name} mark dart does not exist"))
        if any(x.code == "MARK_MISSING" for x in v):
            return
        inner_f = d.face_of_dart[d.marks.inner]
        outer_f = d.face_of_dart[d.marks.outer]
        if plus_faces and inner_f not in plus_faces:
            v.append(Violation("MARK_FACE_SUM", str(d.marks.inner), "inner mark must sit on a +1 face"))
        if minus_faces and outer_f not in minus_faces:
            v.append(Violation("MARK_FACE_SUM", str(d.marks.outer), "outer mark must sit on a -1 face"))
        if not plus_faces and not minus_faces:
            pass  # all sums zero: marks may even coincide (diagram inside a disc)
    elif d.marks is not None:
        v.append(Violation("MARK_MISSING", "-", "crossing-free diagram carries no face marks"))


def _validate_toroidal_sums(d, faces, piece_idx, piece_data, v, strict):
    by_piece: Dict[int, List[Tuple[Tuple[Dart, ...], Tuple[int, int]]]] = {}
    for f in faces:
        s = d.face_sum(f)
        by_piece.setdefault(piece_idx[f[0].crossing], []).append((f, s))
    for i, entries in by_piece.items():
        nz = [(f, s) for f, s in entries if s != (0, 0)]
        if piece_data[i][3] == 0:
            if nz:
                v.append(Violation("LABEL_FACE_SUM", str(nz[0][0][0]),
                                   "filling piece must have (0,0) face sums"))
            continue
        if not nz:
            continue
        if len(nz) != 2 or label_add(nz[0][1], nz[1][1]) != (0, 0):
            v.append(Violation("LABEL_FACE_SUM", str(nz[0][0][0]),
                               "piece face sums must be a +v/-v pair"))
    if strict and not v:
        _check_unimodular(d, v)
    if d.marks is not None:
        v.append(Violation("MARK_MISSING", "-", "toroidal diagrams carry no face marks"))


def _piece_cycle_vectors(d: Diagram, piece: Tuple[str, ...]) -> List[Tuple[int, int]]:
    """Pairing vectors of one piece's fundamental cycles with Z^2.

    Cycle space from a spanning tree; faces pair to zero, so the cotree
    fundamental cycles carry the whole pairing.
    """
    in_piece = set(piece)
    edges = [eid for eid, ds in sorted(d.edge_darts.items()) if ds[0].crossing in in_piece]
    # potentials: P(c) = signed label sum along the tree path root -> c,
    # + when a tree edge is walked from its reference dart towards its mate
    root = piece[0]
    potential: Dict[str, Tuple[int, int]] = {root: (0, 0)}
    tree_edges = set()
    frontier = [root]
    while frontier:
        nxt = []
        for c in frontier:
            for eid in edges:
                ds = d.edge_darts[eid]
                ends = {ds[0].crossing, ds[1].crossing}
                if c not in ends:
                    continue
                other = (ends - {c}).pop() if len(ends) == 2 else c
                if other in potential:
                    continue
                w = d.edge_by_id[eid].label
                sgn = 1 if ds[0].crossing == c else -1
                p = potential[c]
                potential[other] = (p[0] + sgn * w[0], p[1] + sgn * w[1])
                tree_edges.add(eid)
                nxt.append(other)
        frontier = nxt

    vectors = []
    for eid in edges:
        if eid in tree_edges:
            continue
        ds = d.edge_darts[eid]
        tail, head = ds[0].crossing, ds[1].crossing
        w = d.edge_by_id[eid].label
        pt, ph = potential[tail], potential[head]
        vectors.append((w[0] + pt[0] - ph[0], w[1] + pt[1] - ph[1]))
    return vectors


def _check_unimodular(d: Diagram, v: List[Violation]):
    """Strict toroidal check: curve classes pair onto all of Z^2.

    Vectors come from every piece's cycles plus free loop classes; the
    family is unimodular iff the entry gcd and the 2x2 minor gcd are 1.
    """
    vectors: List[Tuple[int, int]] = []
    for piece in d.pieces:
        vectors.extend(_piece_cycle_vectors(d, piece))
    for l in d.loops:
        if l.cls is not None:
            vectors.append(l.cls)

    d1 = 0
    for a, b in vectors:
        d1 = math.gcd(d1, math.gcd(abs(a), abs(b)))
    minors = 0
    for i in range(len(vectors)):
        for j in range(i + 1, len(vectors)):
            det = vectors[i][0] * vectors[j][1] - vectors[i][1] * vectors[j][0]
            minors = math.gcd(minors, abs(det))
    if d1 != 1 or minors != 1:
        v.append(Violation("LABEL_FACE_SUM", "-",
                           "strict mode: class pairing with the homology basis is not unimodular"))


def _validate_fixed(d: Diagram, v: List[Violation]):
    fp = d.fixed
    if fp.kind is None:
        for l in d.loops:
            if l.fixed:
                v.append(Violation("FIXED_SURFACE", l.id, "fixed loop without a fixed part declaration"))
        return
    if d.surface != PLANAR:
        v.append(Violation("FIXED_SURFACE", fp.kind, "mixed diagrams live in the plane"))
        return
    try:
        if fp.kind == "O":
            fixed_ids = {d.resolve_component(fp.o)}
        elif fp.kind == "H":
            fixed_ids = {d.resolve_component(fp.m), d.resolve_component(fp.l)}
            if len(fixed_ids) != 2:
                v.append(Violation("FIXED_NOT_HOPF", "H", "m and l must be distinct components"))
                return
        else:
            v.append(Violation("FIXED_SURFACE", str(fp.kind), "unknown fixed kind"))
            return
    except PseudoLinkError as e:
        v.append(Violation("FIXED_SURFACE", str(fp), str(e)))
        return

    fixed_edges = {eid for eid, c in d.component_of_edge.items() if c in fixed_ids}
    for c in d.crossings:
        on_fixed = [eid in fixed_edges for eid in c.edges]
        if not any(on_fixed):
            continue
        if c.kind == PRECROSS:
            v.append(Violation("FIXED_PRECROSSING", c.id, "precrossing on a fixed edge"))
            continue
        strands = [{c.edges[0], c.edges[2]}, {c.edges[1], c.edges[3]}]
        strand_fixed = [all(e in fixed_edges for e in s) for s in strands]
        half_fixed = [any(e in fixed_edges for e in s) and not all(e in fixed_edges for e in s) for s in strands]
        if any(half_fixed):
            v.append(Violation("FIXED_SELFCROSS", c.id, "strand changes fixed status across a crossing"))
        elif all(strand_fixed):
            if fp.kind == "O":
                v.append(Violation("FIXED_SELFCROSS", c.id, "the fixed unknot has no self-crossings"))
        # mixed crossings (one strand fixed, one moving) are fine

    if fp.kind == "H":
        _validate_hopf(d, fixed_ids, fixed_edges, v)


def _validate_hopf(d: Diagram, fixed_ids, fixed_edges, v: List[Violation]):
    m_id = d.resolve_component(d.fixed.m)
    l_id = d.resolve_component(d.fixed.l)
    clasp = []
    for c in d.crossings:
        if all(eid in fixed_edges for eid in c.edges):
            s0 = d.component_of_edge.get(c.edges[0])
            s1 = d.component_of_edge.get(c.edges[1])
            if s0 == s1:
                v.append(Violation("FIXED_SELFCROSS", c.id, "fixed component self-crossing"))
                return
            clasp.append(c)
    if len(clasp) != 2:
        v.append(Violation("FIXED_NOT_HOPF", d.fixed.kind or "H",
                           f"fixed components cross {len(clasp)} times, expected 2"))
        return
    # one crossing has m under (on slots 0,2), the other l under
    unders = []
    for c in clasp:
        unders.append(d.component_of_edge[c.edges[0]])
    if set(unders) != {m_id, l_id}:
        v.append(Violation("FIXED_NOT_HOPF", clasp[0].id, "clasp must alternate: m over at one crossing, l at the other"))


# ---------------------------------------------------------------------------
# orientation, writhe, mirror


def resolve_orientation(d: Diagram) -> Dict[int, Dart]:
    """Per edge: the dart it points TO, honoring stored seeds.

    Components without a seed get the default direction (away from the
    reference dart of their minimal edge).
    """
    seeds: Dict[ComponentId, Tuple[int, Dart]] = {}
    for cid, eid, to in d.orient_seeds:
        seeds[d.resolve_component(cid)] = (eid, to)
    out: Dict[int, Dart] = {}
    for cid in set(d.component_of_edge.values()):
        walk = list(walk_component(d, cid))
        direction = {}
        for eid, dart, _fwd in walk:
            direction[eid] = d.mate(dart)  # walk departs from `dart`
        if cid in seeds:
            eid, to = seeds[cid]
            if eid not in direction:
                raise PseudoLinkError("INVALID_INPUT", f"orientation edge {eid} not in component {cid}")
            if direction[eid] != to:
                if d.mate(to) != direction[eid]:
                    raise PseudoLinkError("INVALID_INPUT", f"orientation dart {to} not an end of edge {eid}")
                direction = {e: d.mate(dt) for e, dt in direction.items()}
        out.update(direction)
    return out


_SLOT_VEC = ((1, 0), (0, 1), (-1, 0), (0, -1))


def crossing_sign(d: Diagram, c: Crossing, direction: Dict[int, Dart]) -> int:
    """Right-hand sign of a classical crossing under the given orientation."""
    if c.kind != CLASSICAL:
        raise PseudoLinkError("PRECROSSINGS_PRESENT", f"{c.id} has no over/under data")
    under_out = None
    over_out = None
    for s in (0, 2):
        if direction[c.edges[s]] != Dart(c.id, s):
            under_out = s
    for s in (1, 3):
        if direction[c.edges[s]] != Dart(c.id, s):
            over_out = s
    if under_out is None or over_out is None:
        # a strand both of whose edges point in: orientation data inconsistent
        raise PseudoLinkError("INVALID_INPUT", f"orientation inconsistent at {c.id}")
    u = _SLOT_VEC[under_out]
    o = _SLOT_VEC[over_out]
    det = u[0] * o[1] - u[1] * o[0]
    return 1 if det > 0 else -1


def writhe(d: Diagram) -> WritheResult:
    """Writhe of an oriented classical diagram.

    total counts every classical crossing; moving_self counts only
    self-crossings of moving components (mixed crossings excluded).
    """
    if d.has_precrossings():
        raise PseudoLinkError("PRECROSSINGS_PRESENT", "writhe needs a fully resolved diagram")
    direction = resolve_orientation(d)
    total = 0
    moving_self = 0
    for c in d.crossings:
        sgn = crossing_sign(d, c, direction)
        total += sgn
        c0 = d.component_of_edge[c.edges[0]]
        c1 = d.component_of_edge[c.edges[1]]
        if c0 == c1 and not d.is_fixed_component(c0):
            moving_self += sgn
    return WritheResult(total, moving_self)


def self_writhe_sum(d: Diagram) -> int:
    """Sum of per-component self-crossing signs; orientation independent."""
    if d.has_precrossings():
        raise PseudoLinkError("PRECROSSINGS_PRESENT", "self-writhe needs a resolved diagram")
    direction = resolve_orientation(d)
    out = 0
    for c in d.crossings:
        if c.kind != CLASSICAL:
            continue
        c0 = d.component_of_edge[c.edges[0]]
        c1 = d.component_of_edge[c.edges[1]]
        if c0 == c1:
            out += crossing_sign(d, c, direction)
    return out


def mirror(d: Diagram) -> Diagram:
    """Swap over and under at every classical crossing.

    The shadow is unchanged, so marks and orientation seeds ride along by
    each crossing's net tuple rotation.
    """
    shift: Dict[str, int] = {}
    crossings = []
    for c in d.crossings:
        if c.kind != CLASSICAL:
            crossings.append(c)
            continue
        norm = Crossing(c.id, c.kind, rotate(c.edges, 1)).normalized()
        shift[c.id] = next(k for k in range(4) if rotate(c.edges, k) == norm.edges)
        crossings.append(norm)

    def move(dt: Dart) -> Dart:
        return Dart(dt.crossing, (dt.slot - shift.get(dt.crossing, 0)) % 4)

    marks = d.marks
    if marks is not None:
        marks = Marks(move(marks.inner), move(marks.outer))
    seeds = tuple((cid, eid, move(to)) for cid, eid, to in d.orient_seeds)
    return build_diagram(d.surface, crossings, d.edges, d.loops, d.fixed, marks, seeds, d.probs)


def orient(d: Diagram, choices: Dict[ComponentId, Tuple[int, Dart]]) -> Diagram:
    """Attach orientation seeds, one per moving strand component."""
    strand_ids = {cid for cid in d.component_of_edge.values()}
    moving = {cid for cid in strand_ids if not d.is_fixed_component(cid)}
    resolved = {}
    for cid, (eid, to) in choices.items():
        resolved[d.resolve_component(cid)] = (eid, to)
    missing = moving - set(resolved)
    extra = set(resolved) - strand_ids
    if missing or extra:
        raise PseudoLinkError("INVALID_INPUT", f"orientation choices mismatch: missing {sorted(map(str, missing))}, unknown {sorted(map(str, extra))}")
    seeds = tuple((cid, eid, to) for cid, (eid, to) in sorted(resolved.items(), key=lambda kv: str(kv[0])))
    return build_diagram(d.surface, d.crossings, d.edges, d.loops, d.fixed, d.marks, seeds, d.probs)
