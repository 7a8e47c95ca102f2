"""Description-logic toolkit: concepts and TBoxes, finite interpretations,
bisimulation and simulation games, characteristic concepts, types,
rewritability deciders and minimal companions."""

from .errors import ConstructionError, DialectError, DLError, DLSyntaxError, ResourceError
from .syntax import TBox, parse_concept, parse_tbox, render
from .model import Interpretation, parse_interpretation, render_interpretation, satisfies
from .games import distinguish, global_related, greatest_relation, stratified_relation
from .characteristic import CharRequest, char_round_trip_check, characteristic, el_minimal_model
from .types import enumerate_types
from .rewrite import Verdict, alc_to_el, alci_to_alc, equisim_invariant, product_preserved
from .minimize import minimal_companion

__all__ = [
    "ConstructionError", "DialectError", "DLError", "DLSyntaxError", "ResourceError",
    "TBox", "parse_concept", "parse_tbox", "render",
    "Interpretation", "parse_interpretation", "render_interpretation", "satisfies",
    "distinguish", "global_related", "greatest_relation", "stratified_relation",
    "CharRequest", "char_round_trip_check", "characteristic", "el_minimal_model",
    "enumerate_types",
    "Verdict", "alc_to_el", "alci_to_alc", "equisim_invariant", "product_preserved",
    "minimal_companion",
]
