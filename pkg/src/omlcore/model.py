"""In-memory knowledge model: ontologies, collections and the links between.

Two distinctions organize everything.  Instances versus types: object
instances live in collections and are classified by types declared in an
ontology.  Entities versus binary relations: entity types (objects and
data) are the nodes, relation-family types (binary relations and partial
functions) are the edges, carrying source and target entity type
references.  No subtype or disjointness constraint ever crosses the
entity/relation dimension.

Cross-references are stored as the names written in documents and resolved
on demand, so partially bound ontologies (undeclared targets, unloaded
imports) are representable; ``strict`` ontologies reject unresolved names
at declaration time instead.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

from .errors import (
    AmbiguousName,
    DuplicateFunctionValue,
    DuplicateInstanceId,
    DuplicateTypeName,
    GrammarError,
    KindMismatch,
    UnknownPrefix,
    UnresolvedInstanceRef,
    UnresolvedTypeRef,
)
from .xmlparse import is_name


class TypeKind(Enum):
    OBJECT = "Type.Object"
    DATA = "Type.Data"
    BINARY_RELATION = "Type.BinaryRelation"
    FUNCTION = "Type.Function"


ENTITY_KINDS = frozenset({TypeKind.OBJECT, TypeKind.DATA})
RELATION_KINDS = frozenset({TypeKind.BINARY_RELATION, TypeKind.FUNCTION})


@dataclass(eq=False)
class TypeDecl:
    """A declared type.  Identity (not field equality) is the type ref."""

    kind: TypeKind
    name: str
    source_type: str | None = None
    target_type: str | None = None
    comment: str | None = None
    builtin: bool = False
    pos: tuple[str, int, int] | None = field(default=None, repr=False)

    @property
    def is_entity(self) -> bool:
        return self.kind in ENTITY_KINDS

    @property
    def is_relation(self) -> bool:
        return self.kind in RELATION_KINDS

    def __repr__(self):
        if self.is_relation:
            return "<%s %s : %s -> %s>" % (self.kind.value, self.name, self.source_type, self.target_type)
        return "<%s %s>" % (self.kind.value, self.name)


# Predeclared types: the two built-in datatypes plus the two kind roots that
# an axiom with no generic end points at.
STRING = TypeDecl(TypeKind.DATA, "String", builtin=True)
NATNO = TypeDecl(TypeKind.DATA, "Natno", builtin=True)
ENTITY_ROOT = TypeDecl(TypeKind.OBJECT, "Entity", builtin=True)
RELATION_ROOT = TypeDecl(TypeKind.BINARY_RELATION, "BinaryRelation", builtin=True)

BUILTIN_TYPES = {t.name: t for t in (STRING, NATNO, ENTITY_ROOT, RELATION_ROOT)}


def family_root(decl: TypeDecl) -> TypeDecl:
    return ENTITY_ROOT if decl.is_entity else RELATION_ROOT


def same_family(a: TypeDecl, b: TypeDecl) -> bool:
    return a.is_entity == b.is_entity


def natno_lexical_ok(lexical: str) -> bool:
    return bool(re.fullmatch(r"[0-9]+", lexical))


@dataclass(frozen=True)
class Literal:
    """A data value: datatype name plus lexical form."""

    datatype: str
    lexical: str

    def __post_init__(self):
        if self.datatype == "Natno" and not natno_lexical_ok(self.lexical):
            raise ValueError("Natno literal must be a nonempty digit string: %r" % self.lexical)


@dataclass
class SubtypeAxiom:
    specific: str
    generic: str | None = None
    pos: tuple[str, int, int] | None = field(default=None, compare=False, repr=False)


def _check_nsname(nsname: str):
    """typeNSname ::= [ name ':' ] name"""
    prefix, sep, local = nsname.partition(":")
    parts = (prefix, local) if sep else (prefix,)
    if not all(is_name(p) and ":" not in p for p in parts):
        raise GrammarError(26, "invalid type name %r" % nsname)


def _ref_name(ref) -> str:
    return ref.name if isinstance(ref, TypeDecl) else ref


@dataclass(eq=False)
class Ontology:
    name: str = ""
    extends: list[tuple[str, str | None]] = field(default_factory=list)
    types: dict[str, TypeDecl] = field(default_factory=dict)
    axioms: list[SubtypeAxiom] = field(default_factory=list)
    ho_assertions: list = field(default_factory=list)  # owned by the hot module
    disjointness: set[frozenset[str]] = field(default_factory=set)
    incoherent: set[str] = field(default_factory=set)
    derived: dict[str, object] = field(default_factory=dict)  # named calculus expressions
    bound: dict[str, "Ontology"] = field(default_factory=dict)  # import URI -> loaded ontology
    strict: bool = False
    source_name: str = ""

    # -- declarations ------------------------------------------------------

    def declare_type(
        self,
        kind: TypeKind,
        name: str,
        source: str | TypeDecl | None = None,
        target: str | TypeDecl | None = None,
        comment: str | None = None,
        pos=None,
    ) -> TypeDecl:
        if not is_name(name) or ":" in name:
            raise GrammarError(17, "invalid type name %r" % name, pos)
        if name in self.types:
            raise DuplicateTypeName("type %r already declared" % name, pos)
        source = _ref_name(source) if source is not None else None
        target = _ref_name(target) if target is not None else None
        if kind in ENTITY_KINDS:
            if source is not None or target is not None:
                raise KindMismatch("entity type %r cannot carry source/target types" % name, pos)
        else:
            if source is None or target is None:
                raise KindMismatch("relation type %r requires source and target types" % name, pos)
            _check_nsname(source)
            _check_nsname(target)
            if self.strict:
                self.resolve_type(source)
                self.resolve_type(target)
        decl = TypeDecl(kind, name, source, target, comment, pos=pos)
        self.types[name] = decl
        return decl

    def declare_subtype(self, specific, generic=None, pos=None):
        specific = _ref_name(specific)
        generic = _ref_name(generic) if generic is not None else None
        _check_nsname(specific)
        if generic is not None:
            _check_nsname(generic)
        if self.strict:
            self.resolve_type(specific)
        s = self.try_resolve_type(specific)
        g = self.try_resolve_type(generic) if generic is not None else None
        if s is not None and g is not None and not same_family(s, g):
            raise KindMismatch(
                "subtype cannot relate entity and relation types (%s, %s)" % (specific, generic), pos
            )
        self.axioms.append(SubtypeAxiom(specific, generic, pos=pos))

    def declare_disjoint(self, t1, t2, pos=None):
        n1, n2 = _ref_name(t1), _ref_name(t2)
        _check_nsname(n1)
        _check_nsname(n2)
        if self.strict:
            self.resolve_type(n1)
            self.resolve_type(n2)
        a, b = self.try_resolve_type(n1), self.try_resolve_type(n2)
        if a is not None and b is not None and not same_family(a, b):
            raise KindMismatch(
                "disjointness cannot relate entity and relation types (%s, %s)" % (n1, n2), pos
            )
        self.disjointness.add(frozenset((n1, n2)))

    def declare_incoherent(self, t, pos=None):
        n = _ref_name(t)
        _check_nsname(n)
        if self.strict:
            self.resolve_type(n)
        self.incoherent.add(n)

    # -- resolution --------------------------------------------------------

    def resolve_type(self, nsname: str) -> TypeDecl:
        _check_nsname(nsname)
        prefix, sep, local = nsname.partition(":")
        if sep:
            for uri, p in self.extends:
                if p == prefix:
                    imported = self.bound.get(uri)
                    if imported is None:
                        raise UnresolvedTypeRef("import %r for prefix %r is not loaded" % (uri, prefix))
                    decl = imported.types.get(local)
                    if decl is None:
                        raise UnresolvedTypeRef("no type %r in import %r" % (local, uri))
                    return decl
            raise UnknownPrefix("no extends declaration for prefix %r" % prefix)
        if nsname in self.types:
            return self.types[nsname]
        if nsname in BUILTIN_TYPES:
            return BUILTIN_TYPES[nsname]
        hits: list[TypeDecl] = []
        for uri, _p in self.extends:
            imported = self.bound.get(uri)
            if imported is not None and nsname in imported.types:
                decl = imported.types[nsname]
                if all(decl is not h for h in hits):
                    hits.append(decl)
        if len(hits) == 1:
            return hits[0]
        if len(hits) > 1:
            raise AmbiguousName("type name %r found in more than one import" % nsname)
        raise UnresolvedTypeRef("unknown type %r" % nsname)

    def try_resolve_type(self, nsname: str) -> TypeDecl | None:
        try:
            return self.resolve_type(nsname)
        except (UnresolvedTypeRef, UnknownPrefix, AmbiguousName, GrammarError):
            return None

    def name_for(self, decl: TypeDecl) -> str:
        """The name by which this ontology refers to a type."""
        if decl.builtin or self.types.get(decl.name) is decl:
            return decl.name
        for uri, prefix in self.extends:
            imported = self.bound.get(uri)
            if imported is not None and imported.types.get(decl.name) is decl:
                return "%s:%s" % (prefix, decl.name) if prefix else decl.name
        return decl.name

    def all_types(self) -> list[TypeDecl]:
        """Local plus (recursively) imported declarations, in load order."""
        out: list[TypeDecl] = []
        seen: set[int] = set()

        def walk(ont: Ontology):
            if id(ont) in seen:
                return
            seen.add(id(ont))
            out.extend(ont.types.values())
            for imported in ont.bound.values():
                walk(imported)

        walk(self)
        return out


@dataclass(eq=False)
class ObjectInstance:
    id: str | None = None
    about: str | None = None
    classifications: list[str] = field(default_factory=list)
    relation_instances: list["RelationInstance"] = field(default_factory=list)
    function_instances: list["FunctionInstance"] = field(default_factory=list)
    comment: str | None = None
    pos: tuple[str, int, int] | None = field(default=None, repr=False)

    def classify(self, type_name: str):
        type_name = _ref_name(type_name)
        _check_nsname(type_name)
        if type_name not in self.classifications:
            self.classifications.append(type_name)

    def __repr__(self):
        return "<ObjectInstance %s>" % (self.id or self.about or "(anonymous)")


# A stored endpoint is the enclosing object, a raw name from a document, a
# resolved object reference, or a data literal.
Endpoint = "ObjectInstance | Literal | str"


@dataclass(eq=False)
class RelationInstance:
    source: object  # ObjectInstance | str
    target: object  # str | ObjectInstance | Literal
    classifications: list[str] = field(default_factory=list)
    pos: tuple[str, int, int] | None = field(default=None, repr=False)

    def classify(self, type_name: str):
        type_name = _ref_name(type_name)
        _check_nsname(type_name)
        if type_name not in self.classifications:
            self.classifications.append(type_name)


@dataclass(eq=False)
class FunctionInstance:
    source: object
    function_type: str | None
    target: object
    pos: tuple[str, int, int] | None = field(default=None, repr=False)


@dataclass(eq=False)
class Collection:
    id: str | None = None
    ontology: str | None = None  # URI of the governing ontology
    objects: list[ObjectInstance] = field(default_factory=list)
    pos: tuple[str, int, int] | None = field(default=None, repr=False)

    def find(self, instance_id: str) -> ObjectInstance | None:
        for obj in self.objects:
            if obj.id == instance_id:
                return obj
        return None

    def add_object(self, instance_id: str | None = None, about: str | None = None, pos=None) -> ObjectInstance:
        if instance_id is not None and self.find(instance_id) is not None:
            raise DuplicateInstanceId("instance id %r already used in collection" % instance_id, pos)
        obj = ObjectInstance(instance_id, about, pos=pos)
        self.objects.append(obj)
        return obj

    def add_relation_instance(self, obj: ObjectInstance, target, types=(), source=None, pos=None) -> RelationInstance:
        rel = RelationInstance(source if source is not None else obj, target, pos=pos)
        for t in types:
            rel.classify(t)
        obj.relation_instances.append(rel)
        return rel

    def add_function_instance(self, obj: ObjectInstance, function_type, target, source=None, pos=None) -> FunctionInstance:
        name = _ref_name(function_type) if function_type is not None else None
        src = source if source is not None else obj
        if name is not None:
            _check_nsname(name)
            for other in obj.function_instances:
                if other.function_type == name and other.source is src:
                    raise DuplicateFunctionValue(
                        "function %r already has a value for this source" % name, pos
                    )
        fn = FunctionInstance(src, name, target, pos=pos)
        obj.function_instances.append(fn)
        return fn


@dataclass(eq=False)
class KnowledgeBase:
    ontology: Ontology | None = None
    collections: list[Collection] = field(default_factory=list)
    higher_order: bool = False

    @property
    def collection(self) -> Collection | None:
        return self.collections[0] if self.collections else None


# -- endpoint resolution ----------------------------------------------------


def resolve_source(collection: Collection, record) -> object:
    """Resolve a stored source to an object instance, or leave the raw name."""
    src = record.source
    if isinstance(src, (ObjectInstance, Literal)):
        return src
    found = collection.find(src)
    return found if found is not None else src


def _record_type_names(record) -> list[str]:
    if isinstance(record, FunctionInstance):
        return [record.function_type] if record.function_type else []
    return list(record.classifications)


def resolve_target(kb: KnowledgeBase, collection: Collection, record) -> object:
    """Resolve a stored target: declared instance id first, then a data
    literal when the classifying type's target is a datatype, otherwise the
    raw name is kept as a dangling reference."""
    tgt = record.target
    if isinstance(tgt, (ObjectInstance, Literal)):
        return tgt
    found = collection.find(tgt)
    if found is not None:
        return found
    ont = kb.ontology
    if ont is not None:
        for type_name in _record_type_names(record):
            decl = ont.try_resolve_type(type_name)
            if decl is None or not decl.is_relation or decl.target_type is None:
                continue
            target_type = ont.try_resolve_type(decl.target_type)
            if target_type is not None and target_type.kind is TypeKind.DATA:
                if target_type.name == "Natno" and not natno_lexical_ok(tgt):
                    continue
                return Literal(target_type.name, tgt)
    return tgt


def resolve_instance_name(kb: KnowledgeBase, nsname: str, collection: Collection | None = None) -> ObjectInstance:
    """instanceNSname ::= [ typeNSname '#' ] name.

    Bare names resolve against collection-local ids; the qualified form
    resolves among instances classified (directly or derivably) by the type.
    """
    type_part, sep, local = nsname.rpartition("#")
    if sep and (not type_part or not local):
        raise GrammarError(27, "invalid instance name %r" % nsname)
    searched = [collection] if collection is not None else kb.collections
    hits: list[ObjectInstance] = []
    if sep:
        from . import checker  # closure-based membership; late import avoids a cycle

        pairs = checker.subtype_closure(kb.ontology) if kb.ontology else set()
        supers: dict[TypeDecl, set[TypeDecl]] = {}
        for a, b in pairs:
            supers.setdefault(a, set()).add(b)
        want = kb.ontology.try_resolve_type(type_part) if kb.ontology else None
        for coll in searched:
            for obj in coll.objects:
                if obj.id != local:
                    continue
                classes: set[TypeDecl] = set()
                for n in obj.classifications:
                    decl = kb.ontology.try_resolve_type(n) if kb.ontology else None
                    if decl is not None:
                        classes.add(decl)
                        classes.update(supers.get(decl, ()))
                if want is not None and want in classes:
                    hits.append(obj)
    else:
        if not is_name(nsname):
            raise GrammarError(27, "invalid instance name %r" % nsname)
        for coll in searched:
            obj = coll.find(nsname)
            if obj is not None:
                hits.append(obj)
    if len(hits) == 1:
        return hits[0]
    if len(hits) > 1:
        raise AmbiguousName("instance name %r matches in more than one collection" % nsname)
    raise UnresolvedInstanceRef("no instance named %r" % nsname)


# -- semantic equality -------------------------------------------------------

_GENERATED_ID = re.compile(r"_g[0-9]+$")


def _anon_keys(collections) -> dict[int, str]:
    keys: dict[int, str] = {}
    n = 0
    for coll in collections:
        for obj in coll.objects:
            if obj.id is None or _GENERATED_ID.fullmatch(obj.id):
                n += 1
                keys[id(obj)] = "_anon%d" % n
    return keys


def _endpoint_key(x, anon: dict[int, str]):
    if isinstance(x, ObjectInstance):
        if id(x) in anon:
            return anon[id(x)]
        return x.id if x.id is not None else (x.about or "_")
    if isinstance(x, Literal):
        return ("lit", x.datatype, x.lexical)
    if _GENERATED_ID.fullmatch(x):
        return x  # dangling generated name; compared verbatim
    return x


def _expr_fact(expr):
    name = type(expr).__name__
    if isinstance(expr, TypeDecl):
        return ("ref", expr.name)
    if name == "Identity":
        return ("identity", expr.entity_type.name)
    if name == "Compose":
        return ("compose", _expr_fact(expr.first), _expr_fact(expr.second))
    if name == "Transpose":
        return ("transpose", _expr_fact(expr.inner))
    return ("opaque", repr(expr))


def ontology_facts(ont: Ontology | None, collapse_functions: bool = False) -> frozenset:
    if ont is None:
        return frozenset()
    facts = set()
    for decl in ont.types.values():
        kind = decl.kind
        if collapse_functions and kind is TypeKind.FUNCTION:
            kind = TypeKind.BINARY_RELATION
        facts.add(("type", decl.name, kind.value, decl.source_type, decl.target_type))
    for ax in ont.axioms:
        generic = ax.generic
        if generic is not None:
            decl = ont.try_resolve_type(generic)
            if decl is ENTITY_ROOT or decl is RELATION_ROOT:
                generic = None  # an explicit kind root says no more than an absent generic
        facts.add(("subtype", ax.specific, generic))
    for pair in ont.disjointness:
        facts.add(("disjoint", tuple(sorted(pair))))
    for n in ont.incoherent:
        facts.add(("incoherent", n))
    for assertion in ont.ho_assertions:
        facts.add(assertion.fact())
    for name, expr in ont.derived.items():
        facts.add(("derived", name, _expr_fact(expr)))
    return frozenset(facts)


def collection_facts(kb: KnowledgeBase, closed: bool = False, collapse_functions: bool = False) -> frozenset:
    facts = set()
    anon = _anon_keys(kb.collections)
    closure_names: dict[str, set[str]] = {}
    if closed and kb.ontology is not None:
        from . import checker

        for a, b in checker.subtype_closure(kb.ontology):
            closure_names.setdefault(kb.ontology.name_for(a), set()).add(kb.ontology.name_for(b))

    def expand(names):
        out = set(names)
        if closed:
            for n in names:
                out.update(closure_names.get(n, ()))
        return out

    for coll in kb.collections:
        for obj in coll.objects:
            okey = _endpoint_key(obj, anon)
            facts.add(("object", okey, obj.about))
            for n in expand(obj.classifications):
                facts.add(("classified", okey, n))
            for rel in obj.relation_instances:
                skey = _endpoint_key(resolve_source(coll, rel), anon)
                tkey = _endpoint_key(resolve_target(kb, coll, rel), anon)
                for n in expand(rel.classifications):
                    facts.add(("rel", skey, tkey, n))
            for fn in obj.function_instances:
                skey = _endpoint_key(resolve_source(coll, fn), anon)
                tkey = _endpoint_key(resolve_target(kb, coll, fn), anon)
                names = expand([fn.function_type] if fn.function_type else [])
                for n in names:
                    facts.add(("rel" if collapse_functions else "fn", skey, tkey, n))
    return frozenset(facts)


def kb_equal(a: KnowledgeBase, b: KnowledgeBase, closed: bool = False, collapse_functions: bool = False) -> bool:
    """Semantic equality: same declarations, axioms and classified facts.

    ``closed`` compares classifications up to derivability under the subtype
    closure (used for style round-trips, where only the most specific
    classification survives).  ``collapse_functions`` pools function and
    relation facts (used for formats that cannot tell the two apart).
    """
    return ontology_facts(a.ontology, collapse_functions) == ontology_facts(b.ontology, collapse_functions) and (
        collection_facts(a, closed, collapse_functions) == collection_facts(b, closed, collapse_functions)
    )


def ontology_equal(a: Ontology, b: Ontology) -> bool:
    """Structural document equality (declaration content, order-insensitive
    for sets, order-sensitive for axiom lists)."""
    if ontology_facts(a) != ontology_facts(b):
        return False
    return [t.comment for t in a.types.values()] == [t.comment for t in b.types.values()] and a.extends == b.extends


def collection_equal(a: Collection, b: Collection) -> bool:
    """Structural document equality for collections (document order matters
    for objects and their records; classification order does not)."""
    if (a.id, a.ontology) != (b.id, b.ontology) or len(a.objects) != len(b.objects):
        return False

    def raw(x):
        if isinstance(x, ObjectInstance):
            return ("ref", x.id or x.about)
        if isinstance(x, Literal):
            return ("lit", x.datatype, x.lexical)
        return ("name", x)

    def raw_src(obj, x):
        return ("self",) if x is obj else raw(x)

    for oa, ob in zip(a.objects, b.objects):
        if (oa.id, oa.about) != (ob.id, ob.about):
            return False
        if set(oa.classifications) != set(ob.classifications):
            return False
        ra = [(raw_src(oa, r.source), raw(r.target), frozenset(r.classifications)) for r in oa.relation_instances]
        rb = [(raw_src(ob, r.source), raw(r.target), frozenset(r.classifications)) for r in ob.relation_instances]
        if ra != rb:
            return False
        fa = [(raw_src(oa, f.source), f.function_type, raw(f.target)) for f in oa.function_instances]
        fb = [(raw_src(ob, f.source), f.function_type, raw(f.target)) for f in ob.function_instances]
        if fa != fb:
            return False
    return True
