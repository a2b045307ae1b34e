from .expr import (DATATYPES, And, Atom, ConceptExpr, DataExists, DataForAll, DataRange, ExactCard, Exists,
                   ForAll, MaxCard, MinCard, Nominals, Not, Or, coerce_literal, conforms, literal_text)
from .parser import dump_tbox, parse_tbox
from .schema import RoleTable, SchemaFinding, role_closure, well_formed
from .tbox import (Axiom, Default, Disjoint, DistinctIndividuals, Domain, Equiv, InverseRole, NativeCheck,
                   Range, SubConcept, SubRole, TBox)

__all__ = [
    "DATATYPES", "And", "Atom", "ConceptExpr", "DataExists", "DataForAll", "DataRange", "ExactCard", "Exists",
    "ForAll", "MaxCard", "MinCard", "Nominals", "Not", "Or", "coerce_literal", "conforms", "literal_text",
    "dump_tbox", "parse_tbox", "RoleTable", "SchemaFinding", "role_closure", "well_formed",
    "Axiom", "Default", "Disjoint", "DistinctIndividuals", "Domain", "Equiv", "InverseRole", "NativeCheck",
    "Range", "SubConcept", "SubRole", "TBox",
]
