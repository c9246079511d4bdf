"""Adapters to two external knowledge formats.

RDF/S: object types map to classes, binary relation types to properties
with domain and range, subtype axioms to subClassOf/subPropertyOf by kind,
entity classifications to type triples, and each classified relation
instance (a, b) : rho to one triple (a, rho, b).  The wire format is a
deliberately small line-per-triple text: three whitespace-separated terms,
literals double-quoted.  Function types travel as properties with an extra
``oml:Function`` marker triple so the distinction survives a round trip.

XOL-style frame exchange: a module holds classes, slots and individuals;
subtype becomes subclass-of, classification becomes instance-of, relation
and function instances become slot-values with value children, registered
transposes become slot-inverse, comments become documentation.  XOL has no
function/slot distinction, so functions come back as plain relations; that
loss is deliberate and tested.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import calculus, hot
from .diagnostics import Diagnostic
from .dtdgen import PCDATA, DtdDocument, ElementDecl, Particle, RepeatableChoice, Sequence
from .errors import (
    DataTypeUnsupported,
    HigherOrderUnsupported,
    OmlError,
    UnnamedInstance,
    UnsupportedConstruct,
    XolSyntaxError,
)
from .model import (
    Collection,
    FunctionInstance,
    KnowledgeBase,
    Literal,
    ObjectInstance,
    Ontology,
    RelationInstance,
    TypeDecl,
    TypeKind,
    resolve_source,
    resolve_target,
)
from .xmlparse import Comment, Element, escape_text, parse_document

RDF_TYPE = "rdf:type"
RDFS_CLASS = "rdfs:Class"
RDF_PROPERTY = "rdf:Property"
RDFS_SUBCLASSOF = "rdfs:subClassOf"
RDFS_SUBPROPERTYOF = "rdfs:subPropertyOf"
RDFS_DOMAIN = "rdfs:domain"
RDFS_RANGE = "rdfs:range"
RDFS_RESOURCE = "rdfs:Resource"
OML_FUNCTION = "oml:Function"

_VOCAB_PREDICATES = {RDF_TYPE, RDFS_SUBCLASSOF, RDFS_SUBPROPERTYOF, RDFS_DOMAIN, RDFS_RANGE}


@dataclass(frozen=True)
class Lit:
    """A quoted literal term on the triple wire."""

    text: str


@dataclass(frozen=True)
class Triple:
    subject: str
    predicate: str
    object: object  # str | Lit


@dataclass
class TripleDoc:
    triples: list[Triple] = field(default_factory=list)


def _term_out(term) -> str:
    if isinstance(term, Lit):
        escaped = term.text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
        return '"%s"' % escaped
    if not term or any(c in term for c in ' \t"\n'):
        raise OmlError("term %r is not serializable as a triple component" % term)
    return term


def serialize_triples(doc: TripleDoc) -> str:
    return "".join(
        "%s %s %s\n" % (_term_out(t.subject), _term_out(t.predicate), _term_out(t.object)) for t in doc.triples
    )


def parse_triples(text: str, source: str = "<triples>") -> TripleDoc:
    doc = TripleDoc()
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        terms = []
        i = 0
        while i < len(line):
            if line[i] in " \t":
                i += 1
                continue
            if line[i] == '"':
                out = []
                i += 1
                while i < len(line) and line[i] != '"':
                    if line[i] == "\\" and i + 1 < len(line):
                        mapped = {"n": "\n", '"': '"', "\\": "\\"}.get(line[i + 1])
                        if mapped is None:
                            raise OmlError("bad escape in literal", (source, lineno, i + 1))
                        out.append(mapped)
                        i += 2
                    else:
                        out.append(line[i])
                        i += 1
                if i >= len(line):
                    raise OmlError("unterminated literal", (source, lineno, 1))
                i += 1
                terms.append(Lit("".join(out)))
            else:
                j = i
                while j < len(line) and line[j] not in " \t":
                    j += 1
                terms.append(line[i:j])
                i = j
        if len(terms) != 3 or isinstance(terms[0], Lit) or isinstance(terms[1], Lit):
            raise OmlError("expected three terms with a name subject and predicate", (source, lineno, 1))
        doc.triples.append(Triple(terms[0], terms[1], terms[2]))
    return doc


# -- RDF/S export --------------------------------------------------------------


def _subject_id(endpoint) -> str:
    if isinstance(endpoint, ObjectInstance):
        if endpoint.id is None:
            raise UnnamedInstance("cannot export an instance without an id")
        return endpoint.id
    return endpoint


def _object_term(kb, endpoint):
    if isinstance(endpoint, ObjectInstance):
        return _subject_id(endpoint)
    if isinstance(endpoint, Literal):
        if endpoint.datatype not in ("String", "Natno"):
            raise DataTypeUnsupported("no mapping for %r literals" % endpoint.datatype)
        return Lit(endpoint.lexical)
    return endpoint


def export_rdfs(kb: KnowledgeBase, diagnostics: list | None = None) -> TripleDoc:
    ont = kb.ontology
    if ont is None:
        raise OmlError("export requires an ontology")
    if kb.higher_order or ont.ho_assertions:
        raise HigherOrderUnsupported("higher-order assertions have no RDF/S counterpart")
    doc = TripleDoc()
    add = doc.triples.append
    for decl in ont.types.values():
        if decl.kind is TypeKind.DATA and not decl.builtin:
            raise DataTypeUnsupported("declared datatype %r has no RDF/S counterpart" % decl.name)
        if decl.kind is TypeKind.OBJECT:
            add(Triple(decl.name, RDF_TYPE, RDFS_CLASS))
        else:
            add(Triple(decl.name, RDF_TYPE, RDF_PROPERTY))
            if decl.kind is TypeKind.FUNCTION:
                add(Triple(decl.name, RDF_TYPE, OML_FUNCTION))
            add(Triple(decl.name, RDFS_DOMAIN, decl.source_type))
            add(Triple(decl.name, RDFS_RANGE, decl.target_type))
    for ax in ont.axioms:
        s = ont.try_resolve_type(ax.specific)
        if s is None:
            raise OmlError("axiom endpoint %r must resolve for export" % ax.specific)
        if s.is_entity:
            add(Triple(ax.specific, RDFS_SUBCLASSOF, ax.generic or "Entity"))
        else:
            add(Triple(ax.specific, RDFS_SUBPROPERTYOF, ax.generic or "BinaryRelation"))
    if (ont.disjointness or ont.incoherent) and diagnostics is not None:
        diagnostics.append(
            Diagnostic("warning", "RDF005", "disjointness and incoherence declarations are not exported")
        )
    for coll in kb.collections:
        for obj in coll.objects:
            subject = _subject_id(obj)
            add(Triple(subject, RDF_TYPE, RDFS_RESOURCE))
            for name in obj.classifications:
                add(Triple(subject, RDF_TYPE, name))
            for rel in obj.relation_instances:
                skey = _subject_id(resolve_source(coll, rel))
                term = _object_term(kb, resolve_target(kb, coll, rel))
                for name in rel.classifications:
                    add(Triple(skey, name, term))
            for fn in obj.function_instances:
                if fn.function_type is None:
                    continue
                skey = _subject_id(resolve_source(coll, fn))
                add(Triple(skey, fn.function_type, _object_term(kb, resolve_target(kb, coll, fn))))
    return doc


# -- RDF/S import --------------------------------------------------------------


def import_rdfs(doc: TripleDoc) -> tuple[KnowledgeBase, list[Diagnostic]]:
    """Lenient inverse of export: schema triples first rebuild the ontology,
    then subjects of instance triples materialize as object instances (a
    term used only in object position stays a reference by name).  Unmapped
    vocabulary is skipped with a warning."""
    warnings: list[Diagnostic] = []
    ont = Ontology(name="imported")
    classes: list[str] = []
    props: dict[str, dict] = {}

    def prop(name: str) -> dict:
        return props.setdefault(name, {"function": False, "domain": None, "range": None})

    axioms: list[tuple[str, str, str]] = []
    for t in doc.triples:
        if t.predicate == RDF_TYPE and t.object == RDFS_CLASS:
            if t.subject not in classes:
                classes.append(t.subject)
        elif t.predicate == RDF_TYPE and t.object == RDF_PROPERTY:
            prop(t.subject)
        elif t.predicate == RDF_TYPE and t.object == OML_FUNCTION:
            prop(t.subject)["function"] = True
        elif t.predicate == RDFS_DOMAIN:
            prop(t.subject)["domain"] = t.object if isinstance(t.object, str) else None
        elif t.predicate == RDFS_RANGE:
            prop(t.subject)["range"] = t.object if isinstance(t.object, str) else None
        elif t.predicate in (RDFS_SUBCLASSOF, RDFS_SUBPROPERTYOF):
            axioms.append((t.subject, t.predicate, t.object if isinstance(t.object, str) else ""))
    for name in classes:
        ont.declare_type(TypeKind.OBJECT, name)
    for name, info in props.items():
        kind = TypeKind.FUNCTION if info["function"] else TypeKind.BINARY_RELATION
        ont.declare_type(kind, name, source=info["domain"] or "Entity", target=info["range"] or "Entity")
    for s, _p, g in axioms:
        ont.declare_subtype(s, g or None)

    coll = Collection()
    by_id: dict[str, ObjectInstance] = {}

    def materialize(name: str) -> ObjectInstance:
        obj = by_id.get(name)
        if obj is None:
            obj = ObjectInstance(name)
            by_id[name] = obj
            coll.objects.append(obj)
        return obj

    for t in doc.triples:
        if t.predicate in (RDFS_SUBCLASSOF, RDFS_SUBPROPERTYOF, RDFS_DOMAIN, RDFS_RANGE):
            continue
        if t.predicate == RDF_TYPE:
            if t.object in (RDFS_CLASS, RDF_PROPERTY, OML_FUNCTION):
                continue
            obj = materialize(t.subject)
            if t.object == RDFS_RESOURCE:
                continue  # resources are object instances, never relation types
            if isinstance(t.object, str):
                obj.classify(t.object)
            continue
        decl = ont.try_resolve_type(t.predicate)
        if decl is None or not decl.is_relation:
            warnings.append(
                Diagnostic("warning", "RDF003", "triple with unmapped predicate %r skipped" % t.predicate)
            )
            continue
        obj = materialize(t.subject)
        if isinstance(t.object, Lit):
            target_decl = ont.try_resolve_type(decl.target_type) if decl.target_type else None
            datatype = target_decl.name if target_decl is not None and target_decl.kind is TypeKind.DATA else "String"
            try:
                target = Literal(datatype, t.object.text)
            except ValueError:
                warnings.append(
                    Diagnostic("warning", "RDF003", "literal %r is not a valid %s" % (t.object.text, datatype))
                )
                target = Literal("String", t.object.text)
        else:
            target = t.object
        if decl.kind is TypeKind.FUNCTION:
            obj.function_instances.append(FunctionInstance(obj, t.predicate, target))
        else:
            obj.relation_instances.append(RelationInstance(obj, target, [t.predicate]))
    for obj in coll.objects:
        if not obj.classifications:
            warnings.append(
                Diagnostic("warning", "RDF004", "subject %r has no type; imported unclassified" % obj.id)
            )
    return KnowledgeBase(ont, [coll]), warnings


# -- XOL frame exchange --------------------------------------------------------

# The frame-exchange core DTD, completed with the three declarations its
# content models reference but the core leaves out (value, slot-inverse,
# documentation).
XOL_CORE_DTD = DtdDocument(
    [
        ElementDecl(
            "module",
            Sequence((Particle("name", "1"), Particle("class", "*"), Particle("slot", "*"), Particle("individual", "*"))),
        ),
        ElementDecl("name", PCDATA),
        ElementDecl(
            "class",
            Sequence(
                (
                    Particle("name", "1"),
                    Particle(RepeatableChoice(("subclass-of", "instance-of", "slot-values", "documentation")), "*"),
                )
            ),
        ),
        ElementDecl(
            "slot",
            Sequence(
                (
                    Particle("name", "1"),
                    Particle(
                        RepeatableChoice(
                            ("domain", "slot-value-type", "slot-values", "slot-inverse", "documentation")
                        ),
                        "*",
                    ),
                )
            ),
        ),
        ElementDecl(
            "individual",
            Sequence(
                (
                    Particle("name", "1"),
                    Particle(RepeatableChoice(("instance-of", "slot-values", "documentation")), "*"),
                )
            ),
        ),
        ElementDecl("slot-values", Sequence((Particle("name", "1"), Particle("value", "*")))),
        ElementDecl("subclass-of", PCDATA),
        ElementDecl("instance-of", PCDATA),
        ElementDecl("domain", PCDATA),
        ElementDecl("slot-value-type", PCDATA),
        ElementDecl("value", PCDATA),
        ElementDecl("slot-inverse", PCDATA),
        ElementDecl("documentation", PCDATA),
    ]
)


@dataclass
class XolSlotValues:
    name: str
    values: list[str] = field(default_factory=list)


@dataclass
class XolClass:
    name: str
    documentation: str | None = None
    subclass_of: list[str] = field(default_factory=list)
    instance_of: list[str] = field(default_factory=list)
    slot_values: list[XolSlotValues] = field(default_factory=list)


@dataclass
class XolSlot:
    name: str
    documentation: str | None = None
    domain: str | None = None
    slot_value_type: str | None = None
    slot_inverse: str | None = None


@dataclass
class XolIndividual:
    name: str
    documentation: str | None = None
    instance_of: list[str] = field(default_factory=list)
    slot_values: list[XolSlotValues] = field(default_factory=list)


@dataclass
class XolModule:
    name: str
    classes: list[XolClass] = field(default_factory=list)
    slots: list[XolSlot] = field(default_factory=list)
    individuals: list[XolIndividual] = field(default_factory=list)


def _xol_line(tag: str, text: str, indent: str) -> str:
    return "%s<%s>%s</%s>" % (indent, tag, escape_text(text), tag)


def _render_slot_values(sv: XolSlotValues, lines: list[str], indent: str):
    lines.append(indent + "<slot-values>")
    lines.append(_xol_line("name", sv.name, indent + "  "))
    for v in sv.values:
        lines.append(_xol_line("value", v, indent + "  "))
    lines.append(indent + "</slot-values>")


def render_xol(module: XolModule) -> str:
    lines = ["<module>", _xol_line("name", module.name, "  ")]
    for cls in module.classes:
        lines.append("  <class>")
        lines.append(_xol_line("name", cls.name, "    "))
        if cls.documentation is not None:
            lines.append(_xol_line("documentation", cls.documentation, "    "))
        for g in cls.subclass_of:
            lines.append(_xol_line("subclass-of", g, "    "))
        for m in cls.instance_of:
            lines.append(_xol_line("instance-of", m, "    "))
        for sv in cls.slot_values:
            _render_slot_values(sv, lines, "    ")
        lines.append("  </class>")
    for slot in module.slots:
        lines.append("  <slot>")
        lines.append(_xol_line("name", slot.name, "    "))
        if slot.documentation is not None:
            lines.append(_xol_line("documentation", slot.documentation, "    "))
        if slot.domain is not None:
            lines.append(_xol_line("domain", slot.domain, "    "))
        if slot.slot_value_type is not None:
            lines.append(_xol_line("slot-value-type", slot.slot_value_type, "    "))
        if slot.slot_inverse is not None:
            lines.append(_xol_line("slot-inverse", slot.slot_inverse, "    "))
        lines.append("  </slot>")
    for ind in module.individuals:
        lines.append("  <individual>")
        lines.append(_xol_line("name", ind.name, "    "))
        if ind.documentation is not None:
            lines.append(_xol_line("documentation", ind.documentation, "    "))
        for m in ind.instance_of:
            lines.append(_xol_line("instance-of", m, "    "))
        for sv in ind.slot_values:
            _render_slot_values(sv, lines, "    ")
        lines.append("  </individual>")
    lines.append("</module>")
    return "\n".join(lines) + "\n"


def _xol_value(kb: KnowledgeBase, coll, record) -> str:
    target = resolve_target(kb, coll, record)
    if isinstance(target, ObjectInstance):
        if target.id is None:
            raise UnnamedInstance("cannot export a reference to an instance without an id")
        return target.id
    if isinstance(target, Literal):
        return target.lexical
    return target


def _grouped_slot_values(kb: KnowledgeBase, coll, obj) -> list[XolSlotValues]:
    groups: list[XolSlotValues] = []

    def group(name: str) -> XolSlotValues:
        for g in groups:
            if g.name == name:
                return g
        g = XolSlotValues(name)
        groups.append(g)
        return g

    for rel in obj.relation_instances:
        for name in rel.classifications:
            group(name).values.append(_xol_value(kb, coll, rel))
    for fn in obj.function_instances:
        if fn.function_type is None:
            continue
        group(fn.function_type).values.append(_xol_value(kb, coll, fn))
    return groups


def export_xol(kb: KnowledgeBase) -> str:
    ont = kb.ontology
    if ont is None:
        raise OmlError("export requires an ontology")
    module = XolModule(ont.name or "module")
    classes: dict[str, XolClass] = {}
    for decl in ont.types.values():
        if decl.kind is TypeKind.OBJECT:
            cls = XolClass(decl.name, documentation=decl.comment)
            classes[decl.name] = cls
            module.classes.append(cls)
        elif decl.kind is TypeKind.DATA:
            raise UnsupportedConstruct("declared datatype %r has no element in the frame-exchange core" % decl.name)
    for ax in ont.axioms:
        s = ont.try_resolve_type(ax.specific)
        if s is None or ax.specific not in classes:
            raise UnsupportedConstruct("only subtype axioms between declared classes are exportable")
        classes[ax.specific].subclass_of.append(ax.generic or "Entity")
    for assertion in ont.ho_assertions:
        if isinstance(assertion, hot.TypeClassification):
            cls = classes.get(assertion.instance)
            if cls is None:
                raise UnsupportedConstruct(
                    "type classification of %r is not expressible (not a declared class)" % assertion.instance
                )
            cls.instance_of.append(assertion.metatype)
        else:
            cls = classes.get(assertion.source)
            if cls is None:
                raise UnsupportedConstruct("own slot source %r is not a declared class" % assertion.source)
            for g in cls.slot_values:
                if g.name == assertion.relation_type:
                    g.values.append(assertion.target)
                    break
            else:
                cls.slot_values.append(XolSlotValues(assertion.relation_type, [assertion.target]))
    for decl in ont.types.values():
        if decl.is_relation:
            module.slots.append(
                XolSlot(decl.name, documentation=decl.comment, domain=decl.source_type, slot_value_type=decl.target_type)
            )
    for name, expr in ont.derived.items():
        if not (isinstance(expr, calculus.Transpose) and isinstance(expr.inner, TypeDecl)):
            raise UnsupportedConstruct("only transposes of declared relation types are exportable")
        module.slots.append(
            XolSlot(name, domain=expr.inner.target_type, slot_value_type=expr.inner.source_type, slot_inverse=expr.inner.name)
        )
    if ont.disjointness or ont.incoherent:
        raise UnsupportedConstruct("disjointness and incoherence declarations are not expressible")
    for coll in kb.collections:
        for obj in coll.objects:
            if obj.id is None:
                raise UnnamedInstance("frame-exchange individuals require an id")
            ind = XolIndividual(obj.id, documentation=obj.comment)
            ind.instance_of.extend(obj.classifications)
            ind.slot_values.extend(_grouped_slot_values(kb, coll, obj))
            module.individuals.append(ind)
    return render_xol(module)


def parse_xol(text: str, source: str = "<xol>") -> XolModule:
    root = parse_document(text, source)
    if root.name != "module":
        raise XolSyntaxError("root element must be <module>", (source, root.line, root.col))

    def pcdata(elem: Element) -> str:
        for c in elem.children:
            if isinstance(c, Element):
                raise XolSyntaxError("<%s> allows only character data" % elem.name, (source, c.line, c.col))
        return elem.text().strip()

    def named_children(elem: Element):
        name = None
        rest = []
        for c in elem.children:
            if isinstance(c, (str, Comment)):
                if isinstance(c, str) and c.strip():
                    raise XolSyntaxError("unexpected text in <%s>" % elem.name, (source, elem.line, elem.col))
                continue
            if c.name == "name" and name is None:
                name = pcdata(c)
            else:
                rest.append(c)
        if name is None:
            raise XolSyntaxError("<%s> requires a <name> child" % elem.name, (source, elem.line, elem.col))
        return name, rest

    def read_slot_values(elem: Element) -> XolSlotValues:
        name, rest = named_children(elem)
        sv = XolSlotValues(name)
        for c in rest:
            if c.name != "value":
                raise XolSyntaxError("unexpected <%s> in <slot-values>" % c.name, (source, c.line, c.col))
            sv.values.append(pcdata(c))
        return sv

    module_name, items = named_children(root)
    module = XolModule(module_name)
    for item in items:
        if item.name == "class":
            name, rest = named_children(item)
            cls = XolClass(name)
            for c in rest:
                if c.name == "subclass-of":
                    cls.subclass_of.append(pcdata(c))
                elif c.name == "instance-of":
                    cls.instance_of.append(pcdata(c))
                elif c.name == "slot-values":
                    cls.slot_values.append(read_slot_values(c))
                elif c.name == "documentation":
                    cls.documentation = pcdata(c)
                else:
                    raise XolSyntaxError("unexpected <%s> in <class>" % c.name, (source, c.line, c.col))
            module.classes.append(cls)
        elif item.name == "slot":
            name, rest = named_children(item)
            slot = XolSlot(name)
            for c in rest:
                if c.name == "domain":
                    slot.domain = pcdata(c)
                elif c.name == "slot-value-type":
                    slot.slot_value_type = pcdata(c)
                elif c.name == "slot-inverse":
                    slot.slot_inverse = pcdata(c)
                elif c.name == "documentation":
                    slot.documentation = pcdata(c)
                else:
                    raise XolSyntaxError("unexpected <%s> in <slot>" % c.name, (source, c.line, c.col))
            module.slots.append(slot)
        elif item.name == "individual":
            name, rest = named_children(item)
            ind = XolIndividual(name)
            for c in rest:
                if c.name == "instance-of":
                    ind.instance_of.append(pcdata(c))
                elif c.name == "slot-values":
                    ind.slot_values.append(read_slot_values(c))
                elif c.name == "documentation":
                    ind.documentation = pcdata(c)
                else:
                    raise XolSyntaxError("unexpected <%s> in <individual>" % c.name, (source, c.line, c.col))
            module.individuals.append(ind)
        else:
            raise XolSyntaxError("unexpected <%s> in <module>" % item.name, (source, item.line, item.col))
    return module


def import_xol(text: str, source: str = "<xol>") -> KnowledgeBase:
    module = parse_xol(text, source)
    ont = Ontology(name=module.name)
    higher_order = False
    for cls in module.classes:
        ont.declare_type(TypeKind.OBJECT, cls.name, comment=cls.documentation)
    plain = [s for s in module.slots if s.slot_inverse is None]
    inverses = [s for s in module.slots if s.slot_inverse is not None]
    for slot in plain:
        ont.declare_type(
            TypeKind.BINARY_RELATION,
            slot.name,
            source=slot.domain or "Entity",
            target=slot.slot_value_type or "Entity",
            comment=slot.documentation,
        )
    for slot in inverses:
        base = ont.try_resolve_type(slot.slot_inverse)
        if base is None:
            raise XolSyntaxError("slot-inverse %r names no declared slot" % slot.slot_inverse)
        calculus.register_derived(ont, slot.name, calculus.Transpose(base))
    for cls in module.classes:
        for g in cls.subclass_of:
            ont.declare_subtype(cls.name, g)
        for m in cls.instance_of:
            higher_order = True
            ont.ho_assertions.append(hot.TypeClassification(cls.name, m))
        for sv in cls.slot_values:
            higher_order = True
            for v in sv.values:
                ont.ho_assertions.append(hot.OwnSlot(sv.name, cls.name, v))
    coll = Collection()
    for ind in module.individuals:
        obj = coll.add_object(ind.name)
        obj.comment = ind.documentation
        for m in ind.instance_of:
            obj.classify(m)
        for sv in ind.slot_values:
            decl = ont.try_resolve_type(sv.name)
            for v in sv.values:
                if decl is not None and decl.kind is TypeKind.FUNCTION:
                    obj.function_instances.append(FunctionInstance(obj, sv.name, v))
                else:
                    obj.relation_instances.append(RelationInstance(obj, v, [sv.name]))
    return KnowledgeBase(ont, [coll], higher_order=higher_order)
