"""Translation between the generic and specific instance-collection styles.

Generic style spells everything with the core instance vocabulary
(``Instance.Object``, ``Instance.BinaryRelation``, ``classification``...).
Specific style uses the ontology's own type names: each object becomes an
element tagged by its most specific entity classification with an ``id``
attribute, each function instance an attribute, each relation instance a
nested empty element with ``target.Instance``.  The two emitters are polar;
the specific-style reader tolerates generic elements mixed in.
"""

from __future__ import annotations

from . import checker
from .errors import (
    AmbiguousClassification,
    GrammarError,
    MissingClassification,
    OmlError,
    ParseError,
    UnknownAttribute,
    UnknownTag,
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
)
from .xmlio import _build_instance_records, normalize_tag
from .xmlparse import Comment, Element, escape_attr, parse_fragment


def most_specific_type(ont: Ontology, obj: ObjectInstance, subtype_pairs=None) -> TypeDecl:
    """The unique minimal element of the object's entity classifications
    under the subtype closure."""
    if subtype_pairs is None:
        subtype_pairs = checker.subtype_closure(ont)
    decls: list[TypeDecl] = []
    for name in obj.classifications:
        decl = ont.try_resolve_type(name)
        if decl is not None and decl.is_entity and all(decl is not d for d in decls):
            decls.append(decl)
    label = obj.id or obj.about or "(anonymous)"
    if not decls:
        raise MissingClassification("instance %s has no resolvable entity classification" % label, obj.pos)

    def strictly_below(a, b):
        return a is not b and (a, b) in subtype_pairs and (b, a) not in subtype_pairs

    minimal = [d for d in decls if not any(strictly_below(o, d) for o in decls)]
    if len(minimal) != 1:
        raise AmbiguousClassification(
            "instance %s has no unique most specific type among {%s}"
            % (label, ", ".join(sorted(d.name for d in minimal))),
            obj.pos,
        )
    return minimal[0]


def _assign_ids(kb: KnowledgeBase) -> dict[int, str]:
    """Generated ids for anonymous objects, stable in document order."""
    taken = {obj.id for coll in kb.collections for obj in coll.objects if obj.id}
    ids: dict[int, str] = {}
    n = 0
    for coll in kb.collections:
        for obj in coll.objects:
            if obj.id is not None:
                ids[id(obj)] = obj.id
            else:
                n += 1
                while "_g%d" % n in taken:
                    n += 1
                ids[id(obj)] = "_g%d" % n
    return ids


def _value_text(value, ids: dict[int, str]) -> str:
    if isinstance(value, ObjectInstance):
        return ids[id(value)]
    if isinstance(value, Literal):
        return value.lexical
    return value


def to_specific(kb: KnowledgeBase, ontology_label: str | None = None) -> str:
    """Emit the knowledge base's collections in specific style."""
    ont = kb.ontology
    if ont is None:
        raise OmlError("specific style requires an ontology")
    subtype_pairs = checker.subtype_closure(ont)
    ids = _assign_ids(kb)

    # records are grouped under their actual source object
    relations: dict[int, list[RelationInstance]] = {}
    functions: dict[int, list[FunctionInstance]] = {}
    for coll in kb.collections:
        for obj in coll.objects:
            for rel in obj.relation_instances:
                src = resolve_source(coll, rel)
                if not isinstance(src, ObjectInstance):
                    raise OmlError("relation source %r is not an instance in the collection" % src, rel.pos)
                relations.setdefault(id(src), []).append(rel)
            for fn in obj.function_instances:
                src = resolve_source(coll, fn)
                if not isinstance(src, ObjectInstance):
                    raise OmlError("function source %r is not an instance in the collection" % src, fn.pos)
                functions.setdefault(id(src), []).append(fn)

    lines: list[str] = []
    if ontology_label is not None:
        lines.append("<!-- specific style; ontology: %s -->" % ontology_label.replace("--", "~~"))
    for coll in kb.collections:
        for obj in coll.objects:
            tag = ont.name_for(most_specific_type(ont, obj, subtype_pairs))
            attrs = ['id="%s"' % escape_attr(ids[id(obj)])]
            for fn in functions.get(id(obj), ()):
                if fn.function_type is None:
                    raise MissingClassification("function instance has no classification", fn.pos)
                attrs.append('%s="%s"' % (fn.function_type, escape_attr(_value_text(fn.target, ids))))
            children = []
            for rel in relations.get(id(obj), ()):
                if not rel.classifications:
                    raise MissingClassification("relation instance has no classification", rel.pos)
                for name in rel.classifications:
                    children.append(
                        '  <%s target.Instance="%s"/>' % (name, escape_attr(_value_text(rel.target, ids)))
                    )
            open_tag = "<%s %s" % (tag, " ".join(attrs))
            if children:
                lines.append(open_tag + ">")
                lines.extend(children)
                lines.append("</%s>" % tag)
            else:
                lines.append(open_tag + "/>")
    return "\n".join(lines) + "\n"


def _read_relation_element(obj: ObjectInstance, child: Element, decl: TypeDecl, source: str):
    pos = (source, child.line, child.col)
    target = child.attrs.get("target.Instance")
    if target is None:
        raise GrammarError(23, "element <%s> requires target.Instance" % child.name, pos)
    for name in child.attrs:
        if name not in ("target.Instance", "source.Instance"):
            raise UnknownAttribute("attribute %r not allowed on <%s>" % (name, child.name), pos)
    for sub in child.children:
        if isinstance(sub, Element):
            raise UnknownTag("element <%s> must be empty" % child.name, pos)
    src = child.attrs.get("source.Instance", obj)
    if decl.kind is TypeKind.FUNCTION:
        obj.function_instances.append(FunctionInstance(src, child.name, target, pos=pos))
    else:
        obj.relation_instances.append(RelationInstance(src, target, [child.name], pos=pos))


def to_generic(text: str, ont: Ontology, higher_order: bool = False, source: str = "<specific>") -> Collection:
    """Read a specific-style document into a collection bound to ``ont``."""
    coll = Collection()
    for node in parse_fragment(text, source):
        if isinstance(node, Comment):
            continue
        elem = node
        pos = (source, elem.line, elem.col)
        tag = normalize_tag(elem.name, higher_order)
        if tag == "Instance.Object":  # mixtures of the two styles are readable
            obj = ObjectInstance(elem.attrs.get("id"), elem.attrs.get("about"), pos=pos)
            coll.objects.append(obj)
            _build_instance_records(obj, elem, source, higher_order)
            continue
        decl = ont.try_resolve_type(elem.name)
        if decl is None or not decl.is_entity:
            raise UnknownTag("element <%s> does not name a declared entity type" % elem.name, pos)
        obj = ObjectInstance(pos=pos)
        obj.classify(elem.name)
        coll.objects.append(obj)
        for name, value in elem.attrs.items():
            if name == "id":
                obj.id = value
                continue
            if name == "about":
                obj.about = value
                continue
            fdecl = ont.try_resolve_type(name)
            if fdecl is None or fdecl.kind is not TypeKind.FUNCTION:
                raise UnknownAttribute(
                    "attribute %r on <%s> does not name a declared function type" % (name, elem.name), pos
                )
            obj.function_instances.append(FunctionInstance(obj, name, value, pos=pos))
        for child in elem.children:
            if isinstance(child, Comment):
                continue
            if isinstance(child, str):
                if child.strip():
                    raise ParseError("text content not allowed inside <%s>" % elem.name, pos)
                continue
            ctag = normalize_tag(child.name, higher_order)
            if ctag in ("Instance.BinaryRelation", "Instance.Function", "classification"):
                holder = Element(elem.name, {}, [child], elem.line, elem.col)
                _build_instance_records(obj, holder, source, higher_order)
                continue
            cdecl = ont.try_resolve_type(child.name)
            if cdecl is None or not cdecl.is_relation:
                raise UnknownTag(
                    "element <%s> does not name a declared relation type" % child.name,
                    (source, child.line, child.col),
                )
            _read_relation_element(obj, child, cdecl, source)
    return coll
