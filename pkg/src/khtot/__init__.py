"""Perturbed Khovanov-type link homology over F2[H,W].

The main entry points are :func:`build_total`, the homology routines in
:mod:`khtot.algebra` and :func:`s_invariant`.
"""

from .algebra import (
    BigradedComplex,
    gauss_reduce,
    homology_f2,
    homology_localized,
    homology_pid,
    solve_f2,
)
from .complex import THEORIES, build_total, cobordism_map, specialize, theory_complex, verify_d_squared
from .diagram import DiagramError, LinkDiagram, apply_move, from_json, mirror_diagram, parse_pd
from .invariants import UprightSet, genus_bound, parse_upright, s_invariant, s_table

__version__ = "0.1.0"

__all__ = [
    "BigradedComplex", "DiagramError", "LinkDiagram", "THEORIES", "UprightSet",
    "apply_move", "build_total", "cobordism_map", "from_json", "gauss_reduce", "genus_bound",
    "homology_f2", "homology_localized", "homology_pid", "mirror_diagram", "parse_pd",
    "parse_upright", "s_invariant", "s_table", "solve_f2", "specialize", "theory_complex",
    "verify_d_squared",
]
