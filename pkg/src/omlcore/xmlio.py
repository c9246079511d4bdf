"""Reader and writer for the core document grammar.

A document is one ``<OML>`` bracket holding either an ontology or an
instance collection (rule [1]).  Ontologies hold extends declarations,
type declarations and axioms (rules [2]-[8]); collections hold object
instances with nested classification, relation and function instances
(rules [9]-[14]).  Tag synonyms are normalized on input (``Type.Entity``
for ``Type.Object``, ``Instance.Entity`` for ``Instance.Object``, an
optional ``OML:`` tag prefix); canonical output always uses the
``.Object`` spellings without the prefix.

Serialization is canonical and byte-stable: two-space indent, attributes
in grammar order, children in insertion order, self-closing empty
elements, ``<``/``>``/``&`` escaped.

Extensions beyond the core rules, all round-tripped:

  * a ``comment`` attribute on type declarations;
  * a ``<Type.Data name="..."/>`` declaration for named datatypes;
  * ``<!-- OML-EXT disjoint: a b -->`` and ``<!-- OML-EXT incoherent: t -->``
    sidecar comments inside the ontology element, carrying declarations the
    core grammar has no syntax for;
  * with ``higher_order`` enabled: ``classification`` and
    ``Instance.BinaryRelation`` elements inside an ontology (type
    classifications and own slots), ``Individual.*`` tag synonyms, and
    specific-style own-slot elements tagged by a declared relation type.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import hot
from .errors import GrammarError, ImportCycle, ParseError, UnnamedInstance, UnresolvableImport
from .model import (
    Collection,
    FunctionInstance,
    KnowledgeBase,
    Literal,
    ObjectInstance,
    Ontology,
    RelationInstance,
    TypeKind,
)
from .xmlparse import Comment, Element, escape_attr, is_name, parse_document

_TAG_SYNONYMS = {
    "Type.Entity": "Type.Object",
    "Instance.Entity": "Instance.Object",
}
_HO_SYNONYMS = {
    "Individual.Object": "Instance.Object",
    "Individual.Entity": "Instance.Object",
    "Individual.BinaryRelation": "Instance.BinaryRelation",
    "Individual.Function": "Instance.Function",
}

_TYPE_RULES = {"Type.Object": 5, "Type.Data": 5, "Type.BinaryRelation": 6, "Type.Function": 7}
_TYPE_KINDS = {
    "Type.Object": TypeKind.OBJECT,
    "Type.Data": TypeKind.DATA,
    "Type.BinaryRelation": TypeKind.BINARY_RELATION,
    "Type.Function": TypeKind.FUNCTION,
}


@dataclass
class OmlDocument:
    root: object  # Ontology | Collection
    source_name: str = "<oml>"


def normalize_tag(name: str, higher_order: bool = False) -> str:
    if name.startswith("OML:"):
        name = name[len("OML:") :]
    name = _TAG_SYNONYMS.get(name, name)
    if higher_order:
        name = _HO_SYNONYMS.get(name, name)
    return name


def _loc(source: str, elem: Element):
    return (source, elem.line, elem.col)


def _attrs(elem: Element, source: str, rule: int, required: dict, optional: dict) -> dict:
    """Validate attribute presence against the element's rule; returns the
    attribute dict with synonym keys folded to their canonical names."""
    out = {}
    synonyms = {**required, **optional}
    for raw, value in elem.attrs.items():
        key = synonyms.get(raw)
        if key is None:
            raise GrammarError(rule, "attribute %r not allowed on <%s>" % (raw, elem.name), _loc(source, elem))
        if key in out:
            raise GrammarError(rule, "conflicting attribute spellings for %r on <%s>" % (key, elem.name), _loc(source, elem))
        out[key] = value
    for raw, key in required.items():
        if key not in out:
            raise GrammarError(rule, "missing required attribute %r on <%s>" % (raw, elem.name), _loc(source, elem))
    return out


def _no_content(elem: Element, source: str, rule: int):
    for child in elem.children:
        if isinstance(child, Element):
            raise GrammarError(rule, "<%s> cannot contain elements" % elem.name, _loc(source, child))
        if isinstance(child, str) and child.strip():
            raise GrammarError(rule, "<%s> cannot contain text" % elem.name, _loc(source, elem))


def _child_elements(elem: Element, source: str, rule: int):
    for child in elem.children:
        if isinstance(child, str):
            if child.strip():
                raise GrammarError(rule, "text content not allowed inside <%s>" % elem.name, _loc(source, elem))
            continue
        yield child


def _parse_sidecar(ont: Ontology, comment: Comment, source: str):
    text = comment.text.strip()
    body = text[len("OML-EXT") :]
    for line in body.splitlines():
        line = line.strip()
        if not line:
            continue
        keyword, _, rest = line.partition(":")
        names = rest.split()
        if keyword.strip() == "disjoint" and len(names) == 2:
            ont.declare_disjoint(names[0], names[1])
        elif keyword.strip() == "incoherent" and len(names) == 1:
            ont.declare_incoherent(names[0])
        else:
            raise ParseError("unrecognized OML-EXT directive %r" % line, (source, comment.line, comment.col))


def _classification_children(elem: Element, source: str, rule: int) -> list[tuple[str, tuple]]:
    names = []
    for child in _child_elements(elem, source, rule):
        if isinstance(child, Comment):
            continue
        tag = normalize_tag(child.name)
        if tag != "classification":
            raise GrammarError(rule, "only <classification> may appear inside <%s>" % elem.name, _loc(source, child))
        attrs = _attrs(child, source, 14, {"type": "type"}, {})
        _no_content(child, source, 14)
        names.append((attrs["type"], _loc(source, child)))
    return names


def _build_ontology(elem: Element, source: str, higher_order: bool) -> Ontology:
    ont = Ontology(source_name=source)
    for child in elem.children:
        if isinstance(child, str):
            if child.strip():
                raise GrammarError(2, "text content not allowed inside <Ontology>", _loc(source, elem))
            continue
        if isinstance(child, Comment):
            if child.text.strip().startswith("OML-EXT"):
                _parse_sidecar(ont, child, source)
            continue
        tag = normalize_tag(child.name, higher_order)
        pos = _loc(source, child)
        if tag == "extends":
            attrs = _attrs(child, source, 3, {"ontology": "ontology"}, {"prefix": "prefix"})
            _no_content(child, source, 3)
            prefix = attrs.get("prefix")
            if prefix is not None and not is_name(prefix):
                raise GrammarError(16, "invalid prefix %r" % prefix, pos)
            ont.extends.append((attrs["ontology"], prefix))
        elif tag in _TYPE_KINDS:
            rule = _TYPE_RULES[tag]
            kind = _TYPE_KINDS[tag]
            if kind in (TypeKind.BINARY_RELATION, TypeKind.FUNCTION):
                attrs = _attrs(
                    child,
                    source,
                    rule,
                    {"name": "name", "source.Type": "source", "target.Type": "target"},
                    {"comment": "comment"},
                )
            else:
                attrs = _attrs(child, source, rule, {"name": "name"}, {"comment": "comment"})
            _no_content(child, source, rule)
            ont.declare_type(
                kind,
                attrs["name"],
                source=attrs.get("source"),
                target=attrs.get("target"),
                comment=attrs.get("comment"),
                pos=pos,
            )
        elif tag == "subtype":
            attrs = _attrs(child, source, 8, {"specific": "specific"}, {"generic": "generic"})
            _no_content(child, source, 8)
            ont.declare_subtype(attrs["specific"], attrs.get("generic"), pos=pos)
        elif tag == "classification" and higher_order:
            attrs = _attrs(child, source, 8, {"instance": "instance", "type": "type"}, {})
            _no_content(child, source, 8)
            _classify_type_lenient(ont, attrs["instance"], attrs["type"], pos)
        elif tag == "Instance.BinaryRelation" and higher_order:
            attrs = _attrs(
                child,
                source,
                8,
                {},
                {
                    "type": "type",
                    "source.Instance": "source",
                    "source.Type": "source",
                    "target.Instance": "target",
                    "target.Type": "target",
                },
            )
            type_names = [attrs["type"]] if "type" in attrs else []
            type_names += [n for n, _p in _classification_children(child, source, 8)]
            if "source" not in attrs or "target" not in attrs:
                raise GrammarError(8, "own slot requires source and target attributes", pos)
            if not type_names:
                raise GrammarError(8, "own slot requires a relation type", pos)
            for name in type_names:
                ont.ho_assertions.append(hot.OwnSlot(name, attrs["source"], attrs["target"], pos=pos))
        elif higher_order and _own_slot_tag(ont, tag):
            attrs = _attrs(
                child, source, 8, {"source.Instance": "source", "target.Instance": "target"}, {}
            )
            _no_content(child, source, 8)
            ont.ho_assertions.append(hot.OwnSlot(tag, attrs["source"], attrs["target"], pos=pos))
        else:
            raise GrammarError(2, "unexpected element <%s> in <Ontology>" % child.name, pos)
    return ont


def _classify_type_lenient(ont: Ontology, instance: str, metatype: str, pos):
    # unresolved names are recorded and reported by the checker later;
    # a resolvable cross-dimension pair is a hard error
    i, m = ont.try_resolve_type(instance), ont.try_resolve_type(metatype)
    if i is not None and m is not None:
        hot.classify_type(ont, i, m, pos=pos)
    else:
        ont.ho_assertions.append(hot.TypeClassification(instance, metatype, pos=pos))


def _own_slot_tag(ont: Ontology, tag: str) -> bool:
    decl = ont.try_resolve_type(tag)
    return decl is not None and decl.is_relation


def _build_instance_records(obj: ObjectInstance, elem: Element, source: str, higher_order: bool = False):
    for child in _child_elements(elem, source, 11):
        if isinstance(child, Comment):
            continue
        tag = normalize_tag(child.name, higher_order)
        pos = _loc(source, child)
        if tag == "classification":
            attrs = _attrs(child, source, 14, {"type": "type"}, {})
            _no_content(child, source, 14)
            obj.classify(attrs["type"])
        elif tag == "Instance.BinaryRelation":
            attrs = _attrs(
                child, source, 12, {"target.Instance": "target"}, {"source.Instance": "source"}
            )
            rel = RelationInstance(attrs.get("source", obj), attrs["target"], pos=pos)
            for name, _p in _classification_children(child, source, 12):
                rel.classify(name)
            obj.relation_instances.append(rel)
        elif tag == "Instance.Function":
            attrs = _attrs(
                child, source, 13, {"target.Instance": "target"}, {"source.Instance": "source"}
            )
            names = [n for n, _p in _classification_children(child, source, 13)]
            src = attrs.get("source", obj)
            if not names:
                obj.function_instances.append(FunctionInstance(src, None, attrs["target"], pos=pos))
            for name in names:
                obj.function_instances.append(FunctionInstance(src, name, attrs["target"], pos=pos))
        else:
            raise GrammarError(11, "unexpected element <%s> in <Instance.Object>" % child.name, pos)


def _build_collection(elem: Element, source: str, higher_order: bool) -> Collection:
    attrs = _attrs(elem, source, 9, {}, {"id": "id", "ontology": "ontology"})
    if "id" in attrs and not is_name(attrs["id"]):
        raise GrammarError(24, "invalid id %r" % attrs["id"], _loc(source, elem))
    coll = Collection(attrs.get("id"), attrs.get("ontology"), pos=_loc(source, elem))
    for child in _child_elements(elem, source, 9):
        if isinstance(child, Comment):
            continue
        tag = normalize_tag(child.name, higher_order)
        pos = _loc(source, child)
        if tag != "Instance.Object":
            raise GrammarError(10, "unexpected element <%s> in <Collection>" % child.name, pos)
        oattrs = _attrs(child, source, 11, {}, {"id": "id", "about": "about"})
        if "id" in oattrs and not is_name(oattrs["id"]):
            raise GrammarError(24, "invalid id %r" % oattrs["id"], pos)
        obj = ObjectInstance(oattrs.get("id"), oattrs.get("about"), pos=pos)
        coll.objects.append(obj)  # duplicate ids are left for the checker
        _build_instance_records(obj, child, source, higher_order)
    return coll


def parse_oml(text: str, source: str = "<oml>", higher_order: bool = False) -> OmlDocument:
    root = parse_document(text, source)
    if normalize_tag(root.name) != "OML":
        raise GrammarError(1, "root element must be <OML>, found <%s>" % root.name, _loc(source, root))
    if root.attrs:
        raise GrammarError(1, "<OML> carries no attributes", _loc(source, root))
    children = [c for c in root.children if isinstance(c, Element)]
    for c in root.children:
        if isinstance(c, str) and c.strip():
            raise GrammarError(1, "text content not allowed inside <OML>", _loc(source, root))
    if len(children) != 1:
        raise GrammarError(1, "<OML> must hold exactly one ontology or collection", _loc(source, root))
    inner = children[0]
    tag = normalize_tag(inner.name, higher_order)
    if tag == "Ontology":
        if inner.attrs:
            raise GrammarError(2, "<Ontology> carries no attributes", _loc(source, inner))
        return OmlDocument(_build_ontology(inner, source, higher_order), source)
    if tag == "Collection":
        return OmlDocument(_build_collection(inner, source, higher_order), source)
    raise GrammarError(1, "expected <Ontology> or <Collection>, found <%s>" % inner.name, _loc(source, inner))


# -- canonical serialization -------------------------------------------------


def _attr_str(pairs) -> str:
    return "".join(' %s="%s"' % (k, escape_attr(v)) for k, v in pairs if v is not None)


def _target_name(value) -> str:
    if isinstance(value, ObjectInstance):
        if value.id is None:
            raise UnnamedInstance("cannot serialize a reference to an instance without an id")
        return value.id
    if isinstance(value, Literal):
        return value.lexical
    return value


def _serialize_ontology(ont: Ontology, lines: list[str], indent: str):
    items: list[str] = []
    for uri, prefix in ont.extends:
        items.append("<extends%s/>" % _attr_str([("ontology", uri), ("prefix", prefix)]))
    for decl in ont.types.values():
        pairs = [("name", decl.name)]
        if decl.is_relation:
            pairs += [("source.Type", decl.source_type), ("target.Type", decl.target_type)]
        pairs.append(("comment", decl.comment))
        items.append("<%s%s/>" % (decl.kind.value, _attr_str(pairs)))
    for ax in ont.axioms:
        items.append("<subtype%s/>" % _attr_str([("specific", ax.specific), ("generic", ax.generic)]))
    for assertion in ont.ho_assertions:
        if isinstance(assertion, hot.TypeClassification):
            items.append(
                "<classification%s/>"
                % _attr_str([("instance", assertion.instance), ("type", assertion.metatype)])
            )
        else:
            items.append(
                "<Instance.BinaryRelation%s/>"
                % _attr_str(
                    [
                        ("type", assertion.relation_type),
                        ("source.Instance", assertion.source),
                        ("target.Instance", assertion.target),
                    ]
                )
            )
    for pair in sorted(tuple(sorted(p)) for p in ont.disjointness):
        names = pair if len(pair) == 2 else (pair[0], pair[0])
        items.append("<!-- OML-EXT disjoint: %s %s -->" % names)
    for name in sorted(ont.incoherent):
        items.append("<!-- OML-EXT incoherent: %s -->" % name)
    if not items:
        lines.append(indent + "<Ontology/>")
        return
    lines.append(indent + "<Ontology>")
    for item in items:
        lines.append(indent + "  " + item)
    lines.append(indent + "</Ontology>")


def _serialize_record(record, owner, kind_tag: str, names, lines: list[str], indent: str):
    pairs = []
    if record.source is not owner:
        pairs.append(("source.Instance", _target_name(record.source)))
    pairs.append(("target.Instance", _target_name(record.target)))
    if names:
        lines.append(indent + "<%s%s>" % (kind_tag, _attr_str(pairs)))
        for name in names:
            lines.append(indent + '  <classification type="%s"/>' % escape_attr(name))
        lines.append(indent + "</%s>" % kind_tag)
    else:
        lines.append(indent + "<%s%s/>" % (kind_tag, _attr_str(pairs)))


def _serialize_collection(coll: Collection, lines: list[str], indent: str):
    attrs = _attr_str([("id", coll.id), ("ontology", coll.ontology)])
    if not coll.objects:
        lines.append(indent + "<Collection%s/>" % attrs)
        return
    lines.append(indent + "<Collection%s>" % attrs)
    for obj in coll.objects:
        oattrs = _attr_str([("id", obj.id), ("about", obj.about)])
        inner = indent + "  "
        if not (obj.classifications or obj.relation_instances or obj.function_instances):
            lines.append(inner + "<Instance.Object%s/>" % oattrs)
            continue
        lines.append(inner + "<Instance.Object%s>" % oattrs)
        for name in obj.classifications:
            lines.append(inner + '  <classification type="%s"/>' % escape_attr(name))
        for rel in obj.relation_instances:
            _serialize_record(rel, obj, "Instance.BinaryRelation", rel.classifications, lines, inner + "  ")
        for fn in obj.function_instances:
            names = [fn.function_type] if fn.function_type else []
            _serialize_record(fn, obj, "Instance.Function", names, lines, inner + "  ")
        lines.append(inner + "</Instance.Object>")
    lines.append(indent + "</Collection>")


def serialize_generic(doc) -> str:
    """Canonical generic-style text; re-parsing yields an equal value."""
    root = doc.root if isinstance(doc, OmlDocument) else doc
    lines = ["<OML>"]
    if isinstance(root, Ontology):
        _serialize_ontology(root, lines, "  ")
    elif isinstance(root, Collection):
        _serialize_collection(root, lines, "  ")
    else:
        raise TypeError("expected an Ontology or Collection, got %r" % (root,))
    lines.append("</OML>")
    return "\n".join(lines) + "\n"


# -- imports ------------------------------------------------------------------


def _resolver_get(resolver, uri: str) -> str:
    if resolver is None:
        raise UnresolvableImport("no resolver supplied for import %r" % uri)
    try:
        if callable(resolver):
            return resolver(uri)
        return resolver[uri]
    except KeyError:
        raise UnresolvableImport("cannot resolve import %r" % uri) from None


def load_extends(
    doc: OmlDocument,
    resolver=None,
    higher_order: bool = False,
    ontology: Ontology | None = None,
) -> KnowledgeBase:
    """Bind a parsed document into a knowledge base, loading every
    ``extends`` target through ``resolver`` (a mapping or callable from URI
    to document text).  Import cycles are detected across the whole load."""
    cache: dict[str, Ontology] = {}

    def load_uri(uri: str, stack: tuple[str, ...]) -> Ontology:
        if uri in stack:
            raise ImportCycle("import cycle: %s" % " -> ".join(stack + (uri,)))
        if uri in cache:
            return cache[uri]
        imported_doc = parse_oml(_resolver_get(resolver, uri), source=uri, higher_order=higher_order)
        if not isinstance(imported_doc.root, Ontology):
            raise UnresolvableImport("import %r is not an ontology document" % uri)
        ont = imported_doc.root
        cache[uri] = ont
        bind(ont, stack + (uri,))
        return ont

    def bind(ont: Ontology, stack: tuple[str, ...]):
        for uri, _prefix in ont.extends:
            ont.bound[uri] = load_uri(uri, stack)

    root = doc.root
    if isinstance(root, Ontology):
        bind(root, ())
        return KnowledgeBase(root, [], higher_order=higher_order)
    coll: Collection = root
    ont = ontology
    if ont is None and coll.ontology is not None:
        ont = load_uri(coll.ontology, ())
    if ont is not None:
        bind(ont, ())
    return KnowledgeBase(ont, [coll], higher_order=higher_order)
