"""Knowledge model library: ontologies and instance collections with XML
serialization, closure-based consistency checking, a calculus of binary
relation types, domain-specific DTD compilation, generic/specific style
translation and RDF/XOL interoperability."""

from .calculus import (
    Compose,
    Identity,
    Transpose,
    compose_types,
    identity_type,
    register_derived,
    relation_extension,
    transpose_type,
)
from .checker import (
    ClosureTables,
    classification_closure,
    check_preservation_of_classification,
    check_preservation_of_entailment,
    compute_closures,
    derive_incompatible_and_incoherent,
    lint_inclusion_implies_subtype,
    run_all,
    subtype_closure,
)
from .diagnostics import Diagnostic
from .dtdgen import DtdDocument, compile_dtd, parse_dtd, render_dtd, validate_against_dtd
from .errors import OmlError
from .hot import OwnSlot, TypeClassification, assert_own_slot, check_higher_order_classification, classify_type
from .interop import export_rdfs, export_xol, import_rdfs, import_xol, parse_triples, serialize_triples
from .model import (
    Collection,
    FunctionInstance,
    KnowledgeBase,
    Literal,
    ObjectInstance,
    Ontology,
    RelationInstance,
    SubtypeAxiom,
    TypeDecl,
    TypeKind,
    kb_equal,
    resolve_instance_name,
)
from .styles import most_specific_type, to_generic, to_specific
from .xmlio import OmlDocument, load_extends, parse_oml, serialize_generic

__version__ = "0.1.0"
