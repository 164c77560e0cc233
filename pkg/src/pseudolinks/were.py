"""Resolution enumeration and weighted resolution (WeRe) sets.

A pseudo diagram with n precrossings resolves into 2^n classical
diagrams.  Every precrossing carries the probability p of resolving
with the under strand through slots 0 and 2 of its stored tuple; the
other choice gets 1-p, and resolution probabilities multiply.

WeRe sets group resolutions by a key and sum probabilities per class.
Deciding genuine link equality is out of reach here, so the default key
is the invariant bundle; classes are invariant-equivalence classes and
carry a proxy flag to say so.  Everything is exact rationals.
"""

import hashlib
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Callable, Dict, List, Optional, Tuple, Union

from .bracket import invariant_bundle
from .canon import canonical_form
from .diagram import (
    CLASSICAL,
    PRECROSS,
    Crossing,
    Dart,
    Diagram,
    PseudoLinkError,
    build_diagram,
    natural_key,
    rotate,
)
from .laurent import Laurent
from .textio import inline_form

SLOTS02_UNDER = "slots02_under"
SLOTS13_UNDER = "slots13_under"

ProbModel = Dict[str, Fraction]


def prob_model(d: Diagram, m: Optional[ProbModel] = None) -> ProbModel:
    """Complete probability table, keyed in canonical precrossing order.

    Sources in order: the explicit model, the diagram's own prob lines,
    then the uniform 1/2.  Probabilities must be exact rationals.
    """
    pres = set(d.precrossings())
    table: Dict[str, Fraction] = {
        cid: p for cid, p in d.prob_map.items() if cid in pres
    }
    for cid, p in (m or {}).items():
        if cid not in pres:
            raise PseudoLinkError(
                "PROB_DOMAIN_MISMATCH", f"{cid} is not a precrossing of this diagram"
            )
        if isinstance(p, float):
            raise PseudoLinkError(
                "INVALID_INPUT", f"probability for {cid} must be rational, not float"
            )
        p = Fraction(p)
        if not 0 <= p <= 1:
            raise PseudoLinkError(
                "INVALID_INPUT", f"probability {p} for {cid} outside [0,1]"
            )
        table[cid] = p
    return {
        cid: table.get(cid, Fraction(1, 2))
        for cid in sorted(pres, key=natural_key)
    }


def _transport_dart(dart: Dart, cid: str, shift: int) -> Dart:
    if dart.crossing != cid or shift % 4 == 0:
        return dart
    return Dart(cid, (dart.slot - shift) % 4)


def resolve(d: Diagram, choice: Dict[str, str]) -> Diagram:
    """Apply one ResolutionChoice; its domain must be exactly the precrossings."""
    pres = set(d.precrossings())
    if set(choice) != pres:
        raise PseudoLinkError(
            "PROB_DOMAIN_MISMATCH", "choice domain must equal the precrossing set"
        )
    cs: List[Crossing] = []
    shifts: Dict[str, int] = {}
    for c in d.crossings:
        if c.kind != PRECROSS:
            cs.append(c)
            continue
        pick = choice[c.id]
        if pick == SLOTS02_UNDER:
            base, r = c.edges, 0
        elif pick == SLOTS13_UNDER:
            base, r = rotate(c.edges, 1), 1
        else:
            raise PseudoLinkError("INVALID_INPUT", f"unknown choice {pick!r}")
        norm = Crossing(c.id, CLASSICAL, base).normalized()
        for k in (0, 2):
            if rotate(base, k) == norm.edges:
                shifts[c.id] = r + k
                break
        cs.append(norm)
    marks = d.marks
    if marks is not None:
        for cid, shift in shifts.items():
            marks = type(marks)(
                _transport_dart(marks.inner, cid, shift),
                _transport_dart(marks.outer, cid, shift),
            )
    seeds = tuple(
        (comp, eid, _transport_dart(to, to.crossing, shifts.get(to.crossing, 0)))
        for comp, eid, to in d.orient_seeds
    )
    return build_diagram(
        d.surface, cs, d.edges, d.loops, d.fixed, marks, seeds, ()
    )


def resolutions(
    d: Diagram, m: Optional[ProbModel] = None
) -> List[Tuple[Diagram, Fraction]]:
    """All 2^n resolutions with exact probabilities, in canonical order."""
    table = prob_model(d, m)
    pres = list(table)
    out: List[Tuple[Diagram, Fraction]] = []
    for bits in product((SLOTS02_UNDER, SLOTS13_UNDER), repeat=len(pres)):
        choice = dict(zip(pres, bits))
        p = Fraction(1)
        for cid, pick in choice.items():
            p *= table[cid] if pick == SLOTS02_UNDER else 1 - table[cid]
        out.append((resolve(d, choice), p))
    return out


@dataclass(frozen=True)
class WeReClass:
    key: str
    representative: Diagram
    probability: Fraction


@dataclass(frozen=True)
class WeReSet:
    classes: Tuple[WeReClass, ...]
    key_kind: str
    proxy: bool = True


KeySpec = Union[str, Callable[[Diagram], object]]

_KEYS: Dict[str, Callable[[Diagram], str]] = {
    "bracket": lambda d: invariant_bundle(d).text(),
    "canonical": canonical_form,
}


def were_set(
    d: Diagram, m: Optional[ProbModel] = None, key: KeySpec = "bracket"
) -> WeReSet:
    """Group the resolutions of d by the key, summing probabilities.

    Classes keep first-appearance order, so the representative is the
    first resolution of its class in canonical enumeration order.
    Zero-probability resolutions (a model with p equal to 0 or 1) are
    left out, keeping every class probability positive.
    """
    if callable(key):
        fn, kind = key, getattr(key, "__name__", "custom")
    else:
        fn = _KEYS.get(key)
        if fn is None:
            raise PseudoLinkError("INVALID_INPUT", f"unknown key kind {key!r}")
        kind = key
    order: List[str] = []
    reps: Dict[str, Diagram] = {}
    mass: Dict[str, Fraction] = {}
    for res, p in resolutions(d, m):
        if p == 0:
            continue
        k = str(fn(res))
        if k not in reps:
            order.append(k)
            reps[k] = res
            mass[k] = p
        else:
            mass[k] += p
    classes = tuple(WeReClass(k, reps[k], mass[k]) for k in order)
    return WeReSet(classes, kind, proxy=True)


def invariant_set(w: WeReSet, inv: Callable[[Diagram], object]):
    """Apply inv to each class representative, merging equal values."""
    order: List[object] = []
    mass: Dict[object, Fraction] = {}
    for cl in w.classes:
        v = inv(cl.representative)
        if v in mass:
            mass[v] += cl.probability
        else:
            order.append(v)
            mass[v] = cl.probability
    return [(v, mass[v]) for v in order]


def _value_text(v: object) -> str:
    if isinstance(v, Laurent):
        return v.text()
    text = getattr(v, "text", None)
    return text() if callable(text) else str(v)


def key_hash(key: str) -> str:
    return hashlib.sha256(key.encode()).hexdigest()[:12]


def were_table(w: WeReSet, inv: Optional[Callable[[Diagram], object]] = None) -> str:
    """Render `key-hash | probability | representative | invariant value`."""
    out = [f"# key: {w.key_kind}; proxy={'yes' if w.proxy else 'no'}"]
    for cl in w.classes:
        val = _value_text(inv(cl.representative)) if inv else "-"
        out.append(
            f"{key_hash(cl.key)} | {cl.probability} | "
            f"{inline_form(cl.representative)} | {val}"
        )
    return "\n".join(out) + "\n"
