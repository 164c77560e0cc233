"""Line-oriented text format for diagrams.

    surface planar|annular|toroidal
    fixed O <component-id>
    fixed H m=<component-id> l=<component-id>
    crossing X|P <id> (<e0>,<e1>,<e2>,<e3>)
    edge <id> w=<int>            annular; toroidal uses w=(<int>,<int>)
    loop <id> [class=...] [fixed]
    face inner <crossing>.<slot>
    face outer <crossing>.<slot>
    orient <component-id> <edge-id> -> <crossing>.<slot>
    prob <crossing-id> <p>/<q>

'#' starts a comment.  Edges omitted from the listing default to label 0
(or (0,0)).  The inline form joins the same statements with ';'.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import List, Optional, Tuple

from .diagram import (
    ANNULAR,
    CLASSICAL,
    PLANAR,
    PRECROSS,
    TOROIDAL,
    ComponentId,
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
    natural_key,
    zero_label,
)


class ParseError(PseudoLinkError):
    def __init__(self, line_no: int, message: str):
        super().__init__("INVALID_INPUT", f"line {line_no}: {message}")
        self.line_no = line_no


_TOKEN = re.compile(r"^[A-Za-z][A-Za-z0-9_-]*$")
_DART = re.compile(r"^([A-Za-z][A-Za-z0-9_-]*)\.([0-3])$")


def _parse_component_id(tok: str, ln: int) -> ComponentId:
    if re.fullmatch(r"-?\d+", tok):
        return int(tok)
    if _TOKEN.match(tok):
        return tok
    raise ParseError(ln, f"bad component id {tok!r}")


def _parse_dart(tok: str, ln: int) -> Dart:
    m = _DART.match(tok)
    if not m:
        raise ParseError(ln, f"bad dart {tok!r}, expected <crossing>.<slot>")
    return Dart(m.group(1), int(m.group(2)))


def _parse_label(tok: str, ln: int) -> Label:
    if re.fullmatch(r"-?\d+", tok):
        return int(tok)
    m = re.fullmatch(r"\((-?\d+),(-?\d+)\)", tok)
    if m:
        return (int(m.group(1)), int(m.group(2)))
    raise ParseError(ln, f"bad label {tok!r}")


def parse_diagram(text: str) -> Diagram:
    """Decode a diagram; structural errors raise, topology is not checked."""
    surface: Optional[str] = None
    crossings: List[Crossing] = []
    edges = {}
    loops: List[FreeLoop] = []
    fixed = FixedPart()
    inner: Optional[Dart] = None
    outer: Optional[Dart] = None
    orient_seeds: List[Tuple[ComponentId, int, Dart]] = []
    probs: List[Tuple[str, Fraction]] = []
    seen_crossings = set()
    seen_loops = set()

    statements: List[Tuple[int, str]] = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        for stmt in body.split(";"):
            stmt = stmt.strip()
            if stmt:
                statements.append((ln, stmt))

    for ln, stmt in statements:
        parts = stmt.split()
        head = parts[0]
        if head == "surface":
            if len(parts) != 2 or parts[1] not in (PLANAR, ANNULAR, TOROIDAL):
                raise ParseError(ln, f"bad surface statement {stmt!r}")
            if surface is not None:
                raise ParseError(ln, "duplicate surface statement")
            surface = parts[1]
        elif head == "fixed":
            if fixed.kind is not None:
                raise ParseError(ln, "duplicate fixed statement")
            if len(parts) == 3 and parts[1] == "O":
                fixed = FixedPart(kind="O", o=_parse_component_id(parts[2], ln))
            elif len(parts) == 4 and parts[1] == "H":
                kv = {}
                for p in parts[2:]:
                    if "=" not in p:
                        raise ParseError(ln, f"bad fixed H argument {p!r}")
                    k, val = p.split("=", 1)
                    kv[k] = _parse_component_id(val, ln)
                if set(kv) != {"m", "l"}:
                    raise ParseError(ln, "fixed H needs m=<id> l=<id>")
                fixed = FixedPart(kind="H", m=kv["m"], l=kv["l"])
            else:
                raise ParseError(ln, f"bad fixed statement {stmt!r}")
        elif head == "crossing":
            if len(parts) != 4 or parts[1] not in (CLASSICAL, PRECROSS):
                raise ParseError(ln, f"bad crossing statement {stmt!r}")
            cid = parts[2]
            if not _TOKEN.match(cid):
                raise ParseError(ln, f"bad crossing id {cid!r}")
            if cid in seen_crossings:
                raise ParseError(ln, f"duplicate crossing {cid}")
            seen_crossings.add(cid)
            m = re.fullmatch(r"\((-?\d+),(-?\d+),(-?\d+),(-?\d+)\)", parts[3])
            if not m:
                raise ParseError(ln, f"bad slot tuple {parts[3]!r}")
            tup = tuple(int(m.group(i)) for i in range(1, 5))
            crossings.append(Crossing(cid, parts[1], tup))
        elif head == "edge":
            if len(parts) != 3 or not parts[2].startswith("w="):
                raise ParseError(ln, f"bad edge statement {stmt!r}")
            if not re.fullmatch(r"\d+", parts[1]):
                raise ParseError(ln, f"bad edge id {parts[1]!r}")
            eid = int(parts[1])
            if eid in edges:
                raise ParseError(ln, f"duplicate edge {eid}")
            edges[eid] = _parse_label(parts[2][2:], ln)
        elif head == "loop":
            if len(parts) < 2:
                raise ParseError(ln, "loop needs an id")
            lid = parts[1]
            if not _TOKEN.match(lid):
                raise ParseError(ln, f"bad loop id {lid!r}")
            if lid in seen_loops:
                raise ParseError(ln, f"duplicate loop {lid}")
            seen_loops.add(lid)
            cls: Optional[Label] = None
            is_fixed = False
            for p in parts[2:]:
                if p == "fixed":
                    is_fixed = True
                elif p.startswith("class="):
                    cls = _parse_label(p[6:], ln)
                else:
                    raise ParseError(ln, f"bad loop attribute {p!r}")
            loops.append(FreeLoop(lid, cls, is_fixed))
        elif head == "face":
            if len(parts) != 3 or parts[1] not in ("inner", "outer"):
                raise ParseError(ln, f"bad face statement {stmt!r}")
            dart = _parse_dart(parts[2], ln)
            if parts[1] == "inner":
                if inner is not None:
                    raise ParseError(ln, "duplicate inner mark")
                inner = dart
            else:
                if outer is not None:
                    raise ParseError(ln, "duplicate outer mark")
                outer = dart
        elif head == "orient":
            if len(parts) != 5 or parts[3] != "->":
                raise ParseError(ln, f"bad orient statement {stmt!r}")
            cid = _parse_component_id(parts[1], ln)
            if not re.fullmatch(r"\d+", parts[2]):
                raise ParseError(ln, f"bad edge id {parts[2]!r}")
            orient_seeds.append((cid, int(parts[2]), _parse_dart(parts[4], ln)))
        elif head == "prob":
            if len(parts) != 3:
                raise ParseError(ln, f"bad prob statement {stmt!r}")
            m = re.fullmatch(r"(\d+)/(\d+)", parts[2])
            if not m:
                raise ParseError(ln, f"bad probability {parts[2]!r}")
            p, q = int(m.group(1)), int(m.group(2))
            if q == 0 or p > q:
                raise ParseError(ln, f"probability {parts[2]} outside [0,1]")
            probs.append((parts[1], Fraction(p, q)))
        else:
            raise ParseError(ln, f"unknown statement {head!r}")

    if surface is None:
        raise ParseError(0, "missing surface statement")

    if (inner is None) != (outer is None):
        raise ParseError(0, "face marks must come in an inner/outer pair")
    marks = Marks(inner, outer) if inner is not None else None

    # default labels for attached-but-unlisted edges
    attached = {eid for c in crossings for eid in c.edges}
    default = zero_label(surface)
    edge_objs = []
    for eid in sorted(attached | set(edges)):
        label = edges.get(eid, default)
        if surface == PLANAR:
            label = None
        edge_objs.append(Edge(eid, label))
    if surface == PLANAR and any(edges.values()):
        first = min(e for e, w in edges.items() if w)
        raise ParseError(0, f"planar edge {first} cannot carry a label")

    seen_probs = set()
    for cid, _ in probs:
        if cid in seen_probs:
            raise ParseError(0, f"duplicate prob for {cid}")
        seen_probs.add(cid)

    return build_diagram(surface, crossings, edge_objs, loops, fixed, marks, orient_seeds, probs)


def _format_label(w: Label) -> str:
    if isinstance(w, tuple):
        return f"({w[0]},{w[1]})"
    return str(w)


def serialize_diagram(d: Diagram, inline: bool = False) -> str:
    """Deterministic encoding; zero-labeled edges are omitted."""
    out: List[str] = [f"surface {d.surface}"]
    if d.fixed.kind == "O":
        out.append(f"fixed O {d.fixed.o}")
    elif d.fixed.kind == "H":
        out.append(f"fixed H m={d.fixed.m} l={d.fixed.l}")
    for c in sorted(d.crossings, key=lambda c: natural_key(c.id)):
        tup = ",".join(str(e) for e in c.edges)
        out.append(f"crossing {c.kind} {c.id} ({tup})")
    for e in d.edges:
        if e.label is not None and not (e.label == 0 or e.label == (0, 0)):
            out.append(f"edge {e.id} w={_format_label(e.label)}")
    for l in d.loops:
        bits = [f"loop {l.id}"]
        if l.cls is not None and d.surface != PLANAR:
            bits.append(f"class={_format_label(l.cls)}")
        if l.fixed:
            bits.append("fixed")
        out.append(" ".join(bits))
    if d.marks is not None:
        out.append(f"face inner {d.marks.inner}")
        out.append(f"face outer {d.marks.outer}")
    for cid, eid, to in d.orient_seeds:
        out.append(f"orient {cid} {eid} -> {to}")
    for cid, p in d.probs:
        out.append(f"prob {cid} {p.numerator}/{p.denominator}")
    if inline:
        return "; ".join(out)
    return "\n".join(out) + "\n"


def inline_form(d: Diagram) -> str:
    return serialize_diagram(d, inline=True)
