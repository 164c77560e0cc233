"""Pseudo link diagrams on the plane, annulus and torus.

Extended PD codes with precrossings, surface labels and marked faces;
local moves; bracket-type invariants as exact Laurent polynomials;
weighted resolution sets; conversions to and from mixed-link standard
position.
"""

from .diagram import (
    ANNULAR,
    CLASSICAL,
    PLANAR,
    PRECROSS,
    TOROIDAL,
    Crossing,
    Dart,
    Diagram,
    Edge,
    FixedPart,
    FreeLoop,
    Marks,
    PseudoLinkError,
    ValidationReport,
    Violation,
    build_diagram,
    components,
    homology_class,
    mirror,
    orient,
    self_writhe_sum,
    trace_faces,
    validate,
    writhe,
)
from .textio import ParseError, inline_form, parse_diagram, serialize_diagram
from .canon import canonical_diagram, canonical_form, relabel, tree_gauge
from .laurent import Laurent
from .moves import (
    MOVE_KINDS,
    MoveSite,
    apply_move,
    catalog_text,
    enumerate_moves,
    parse_site,
    scramble,
    site,
)

__all__ = [
    "ANNULAR",
    "CLASSICAL",
    "PLANAR",
    "PRECROSS",
    "TOROIDAL",
    "Crossing",
    "Dart",
    "Diagram",
    "Edge",
    "FixedPart",
    "FreeLoop",
    "Laurent",
    "MOVE_KINDS",
    "Marks",
    "MoveSite",
    "ParseError",
    "PseudoLinkError",
    "ValidationReport",
    "Violation",
    "apply_move",
    "build_diagram",
    "canonical_diagram",
    "canonical_form",
    "catalog_text",
    "components",
    "enumerate_moves",
    "homology_class",
    "inline_form",
    "mirror",
    "orient",
    "parse_diagram",
    "parse_site",
    "relabel",
    "scramble",
    "self_writhe_sum",
    "serialize_diagram",
    "site",
    "trace_faces",
    "tree_gauge",
    "validate",
    "writhe",
]

__version__ = "0.1.0"
