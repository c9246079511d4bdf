"""Compile an ontology into a domain-specific DTD, and validate documents
against DTDs of that shape.

Generation rules, per object type in declaration order: an element whose
content is the repeatable choice of binary relation elements applicable to
it (declared on it or inherited from a supertype), a required ``id``
attribute of type ID, and one implied attribute per applicable function
type (NMTOKEN when the function targets Natno, CDATA otherwise).  Each
binary relation type becomes a single global EMPTY element with a required
``target.Instance`` attribute, emitted right after the first object element
that references it.

The validator additionally understands #PCDATA and sequence content models
so hand-written frame-exchange DTDs can be checked with the same machinery.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .diagnostics import Diagnostic, sort_diagnostics
from .errors import NameCollision, ParseError
from .model import Ontology, TypeKind
from .xmlparse import Element, is_name, is_nmtoken, parse_fragment


@dataclass(frozen=True)
class Empty:
    def render(self) -> str:
        return "EMPTY"


@dataclass(frozen=True)
class PCData:
    def render(self) -> str:
        return "(#PCDATA)"


@dataclass(frozen=True)
class RepeatableChoice:
    names: tuple[str, ...]

    def render(self) -> str:
        return "(%s)*" % " | ".join(self.names)


@dataclass(frozen=True)
class Particle:
    item: object  # str | RepeatableChoice
    occurs: str  # "1" or "*"

    def render(self) -> str:
        if isinstance(self.item, RepeatableChoice):
            return self.item.render()
        return self.item + ("*" if self.occurs == "*" else "")


@dataclass(frozen=True)
class Sequence:
    particles: tuple[Particle, ...]

    def render(self) -> str:
        return "(%s)" % ", ".join(p.render() for p in self.particles)


EMPTY = Empty()
PCDATA = PCData()


@dataclass(frozen=True)
class AttDef:
    name: str
    type: str  # ID | CDATA | NMTOKEN
    default: str  # #REQUIRED | #IMPLIED


@dataclass
class ElementDecl:
    name: str
    content: object
    attdefs: list[AttDef] = field(default_factory=list)


@dataclass
class DtdDocument:
    elements: list[ElementDecl] = field(default_factory=list)

    def element(self, name: str) -> ElementDecl | None:
        for decl in self.elements:
            if decl.name == name:
                return decl
        return None

    def content_names(self, model) -> set[str]:
        if isinstance(model, RepeatableChoice):
            return set(model.names)
        if isinstance(model, Sequence):
            out = set()
            for p in model.particles:
                out |= {p.item} if isinstance(p.item, str) else set(p.item.names)
            return out
        return set()


# -- generation ---------------------------------------------------------------


def _types_with_owner(ont: Ontology):
    """(decl, owning ontology) for local and recursively imported types, in
    load order; references inside a declaration resolve against its owner."""
    out = []
    seen: set[int] = set()

    def walk(o: Ontology):
        if id(o) in seen:
            return
        seen.add(id(o))
        out.extend((decl, o) for decl in o.types.values())
        for imported in o.bound.values():
            walk(imported)

    walk(ont)
    return out


def compile_dtd(ont: Ontology, diagnostics: list | None = None) -> DtdDocument:
    """Deterministic translation; element and attribute names are the names
    by which this ontology refers to each type."""
    from .checker import subtype_closure

    closure = subtype_closure(ont)
    typed = _types_with_owner(ont)
    object_types = [(d, o) for d, o in typed if d.kind is TypeKind.OBJECT]
    relation_types = [(d, o) for d, o in typed if d.kind is TypeKind.BINARY_RELATION]
    function_types = [(d, o) for d, o in typed if d.kind is TypeKind.FUNCTION]

    def applicable(decls, obj):
        """Declared on obj, or on a declared supertype of obj."""
        out = []
        for decl, owner in decls:
            src = owner.try_resolve_type(decl.source_type) if decl.source_type else None
            if src is None:
                continue
            if src is obj:
                out.append((decl, owner, False))
            elif (obj, src) in closure:
                out.append((decl, owner, True))
        return out

    dtd = DtdDocument()
    declared: set[str] = set()

    def declare(decl: ElementDecl):
        if decl.name in declared:
            raise NameCollision("element name %r declared twice" % decl.name)
        if not is_name(decl.name):
            raise NameCollision("type name %r is not usable as an element name" % decl.name)
        declared.add(decl.name)
        dtd.elements.append(decl)

    def relation_element(rel: TypeDecl) -> ElementDecl:
        return ElementDecl(ont.name_for(rel), EMPTY, [AttDef("target.Instance", "CDATA", "#REQUIRED")])

    emitted_relations: set[int] = set()
    for obj, _owner in object_types:
        obj_name = ont.name_for(obj)
        rels = applicable(relation_types, obj)
        content = RepeatableChoice(tuple(ont.name_for(r) for r, _o, _inh in rels)) if rels else EMPTY
        attdefs = [AttDef("id", "ID", "#REQUIRED")]
        for fn, owner, inherited in applicable(function_types, obj):
            fn_name = ont.name_for(fn)
            if any(a.name == fn_name for a in attdefs):
                raise NameCollision("attribute %r collides on element %r" % (fn_name, obj_name))
            target = owner.try_resolve_type(fn.target_type) if fn.target_type else None
            att_type = "NMTOKEN" if target is not None and target.name == "Natno" else "CDATA"
            attdefs.append(AttDef(fn_name, att_type, "#IMPLIED"))
            if inherited and diagnostics is not None:
                diagnostics.append(
                    Diagnostic(
                        "info",
                        "DTD002",
                        "element %s inherits attribute %s from supertype %s" % (obj_name, fn_name, fn.source_type),
                    )
                )
        declare(ElementDecl(obj_name, content, attdefs))
        for rel, _owner, inherited in rels:
            if inherited and diagnostics is not None:
                diagnostics.append(
                    Diagnostic(
                        "info",
                        "DTD002",
                        "element %s admits relation %s inherited from supertype %s"
                        % (obj_name, ont.name_for(rel), rel.source_type),
                    )
                )
            if id(rel) not in emitted_relations:
                emitted_relations.add(id(rel))
                declare(relation_element(rel))
    for rel, _owner in relation_types:
        if id(rel) not in emitted_relations:
            emitted_relations.add(id(rel))
            declare(relation_element(rel))
    return dtd


def render_dtd(dtd: DtdDocument) -> str:
    blocks = []
    for decl in dtd.elements:
        lines = ["<!ELEMENT %s %s>" % (decl.name, decl.content.render())]
        if decl.attdefs:
            lines.append("<!ATTLIST %s" % decl.name)
            for i, att in enumerate(decl.attdefs):
                end = ">" if i == len(decl.attdefs) - 1 else ""
                lines.append("    %s %s %s%s" % (att.name, att.type, att.default, end))
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


# -- DTD text parsing (for reading generated or hand-written DTDs back) -------


def _strip_comments(text: str) -> str:
    out = []
    i = 0
    while True:
        j = text.find("<!--", i)
        if j < 0:
            out.append(text[i:])
            return "".join(out)
        out.append(text[i:j])
        k = text.find("-->", j)
        if k < 0:
            raise ParseError("unterminated comment in DTD")
        i = k + 3


def _parse_content_model(spec: str):
    spec = spec.strip()
    if spec == "EMPTY":
        return EMPTY
    if not (spec.startswith("(") and spec.endswith(")") or spec.endswith(")*")):
        raise ParseError("unsupported content model %r" % spec)

    def split_top(body: str, sep: str) -> list[str]:
        parts, depth, cur = [], 0, []
        for c in body:
            if c == "(":
                depth += 1
            elif c == ")":
                depth -= 1
            if c == sep and depth == 0:
                parts.append("".join(cur))
                cur = []
            else:
                cur.append(c)
        parts.append("".join(cur))
        return [p.strip() for p in parts]

    def parse_group(g: str):
        g = g.strip()
        occurs = "1"
        if g.endswith("*"):
            occurs, g = "*", g[:-1].strip()
        if g.startswith("(") and g.endswith(")"):
            body = g[1:-1].strip()
            if body == "#PCDATA":
                return PCDATA
            if occurs == "*":
                if len(split_top(body, ",")) > 1:
                    raise ParseError("repeatable sequence groups are not supported: %r" % g)
                return RepeatableChoice(tuple(split_top(body, "|")))
            if len(split_top(body, "|")) > 1:
                raise ParseError("choice groups must be repeatable: %r" % g)
            particles = []
            for part in split_top(body, ","):
                p = parse_group(part)
                if isinstance(p, RepeatableChoice):
                    particles.append(Particle(p, "*"))
                elif isinstance(p, Particle):
                    particles.append(p)
                else:
                    raise ParseError("unsupported content particle %r" % part)
            return Sequence(tuple(particles))
        if not is_name(g):
            raise ParseError("unsupported content particle %r" % g)
        return Particle(g, occurs)

    model = parse_group(spec)
    if isinstance(model, Particle):
        raise ParseError("unsupported content model %r" % spec)
    return model


def parse_dtd(text: str) -> DtdDocument:
    text = _strip_comments(text)
    dtd = DtdDocument()
    pending_atts: dict[str, list[AttDef]] = {}
    i = 0
    while True:
        j = text.find("<!", i)
        if j < 0:
            break
        k = text.find(">", j)
        if k < 0:
            raise ParseError("unterminated declaration in DTD")
        decl_text = text[j + 2 : k].strip()
        i = k + 1
        if decl_text.startswith("ELEMENT"):
            rest = decl_text[len("ELEMENT") :].strip()
            name, _, spec = rest.partition(" ")
            dtd.elements.append(ElementDecl(name.strip(), _parse_content_model(spec)))
        elif decl_text.startswith("ATTLIST"):
            tokens = decl_text[len("ATTLIST") :].split()
            if not tokens or (len(tokens) - 1) % 3 != 0:
                raise ParseError("malformed ATTLIST declaration")
            element = tokens[0]
            atts = pending_atts.setdefault(element, [])
            for n in range(1, len(tokens), 3):
                name, att_type, default = tokens[n : n + 3]
                if att_type not in ("ID", "CDATA", "NMTOKEN"):
                    raise ParseError("unsupported attribute type %r" % att_type)
                if default not in ("#REQUIRED", "#IMPLIED"):
                    raise ParseError("unsupported attribute default %r" % default)
                atts.append(AttDef(name, att_type, default))
        else:
            raise ParseError("unsupported DTD declaration %r" % decl_text.split()[0])
    for element, atts in pending_atts.items():
        decl = dtd.element(element)
        if decl is None:
            raise ParseError("ATTLIST for undeclared element %r" % element)
        decl.attdefs.extend(atts)
    return dtd


# -- validation ----------------------------------------------------------------


def validate_against_dtd(dtd: DtdDocument, text: str, source: str = "<xml>") -> list[Diagnostic]:
    """Structural validation: declared elements, content models, required
    attributes, ID uniqueness and token lexical form."""
    try:
        nodes = parse_fragment(text, source)
    except ParseError as err:
        return [Diagnostic("error", err.code, err.message, err.location)]
    diags: list[Diagnostic] = []
    seen_ids: dict[str, tuple] = {}

    def err(code, msg, elem):
        diags.append(Diagnostic("error", code, msg, (source, elem.line, elem.col)))

    def check_content(elem: Element, decl: ElementDecl):
        children = elem.child_elements()
        has_text = any(isinstance(c, str) and c.strip() for c in elem.children)
        model = decl.content
        if isinstance(model, Empty):
            if children:
                err("VAL002", "element %s must be empty" % elem.name, children[0])
            if has_text:
                err("VAL002", "element %s must be empty" % elem.name, elem)
            return
        if isinstance(model, PCData):
            if children:
                err("VAL002", "element %s allows only character data" % elem.name, children[0])
            return
        if has_text:
            err("VAL002", "element %s does not allow character data" % elem.name, elem)
        if isinstance(model, RepeatableChoice):
            for child in children:
                if child.name not in model.names:
                    err("VAL002", "element %s not allowed inside %s" % (child.name, elem.name), child)
            return
        # sequence: greedy left-to-right match
        idx = 0
        for particle in model.particles:
            if isinstance(particle.item, RepeatableChoice):
                while idx < len(children) and children[idx].name in particle.item.names:
                    idx += 1
            elif particle.occurs == "*":
                while idx < len(children) and children[idx].name == particle.item:
                    idx += 1
            else:
                if idx < len(children) and children[idx].name == particle.item:
                    idx += 1
                else:
                    where = children[idx] if idx < len(children) else elem
                    err("VAL002", "element %s requires a %s here" % (elem.name, particle.item), where)
        for child in children[idx:]:
            err("VAL002", "element %s not allowed at this position in %s" % (child.name, elem.name), child)

    def walk(elem: Element):
        decl = dtd.element(elem.name)
        if decl is None:
            err("VAL001", "element %s is not declared" % elem.name, elem)
        else:
            atts = {a.name: a for a in decl.attdefs}
            for name, value in elem.attrs.items():
                att = atts.get(name)
                if att is None:
                    err("VAL004", "attribute %s is not declared on %s" % (name, elem.name), elem)
                    continue
                if att.type == "ID":
                    if not is_name(value):
                        err("VAL006", "ID value %r is not a name" % value, elem)
                    elif value in seen_ids:
                        err("VAL005", "duplicate ID %r" % value, elem)
                    else:
                        seen_ids[value] = (elem.line, elem.col)
                elif att.type == "NMTOKEN" and not is_nmtoken(value):
                    err("VAL006", "value %r is not a valid NMTOKEN" % value, elem)
            for att in decl.attdefs:
                if att.default == "#REQUIRED" and att.name not in elem.attrs:
                    err("VAL003", "required attribute %s missing on %s" % (att.name, elem.name), elem)
            check_content(elem, decl)
        for child in elem.child_elements():
            walk(child)

    for node in nodes:
        if isinstance(node, Element):
            walk(node)
    return sort_diagnostics(diags)
