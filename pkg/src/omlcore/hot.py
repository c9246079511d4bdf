"""Higher-order extension: types classified by metatypes, and relation
instances whose endpoints are types (own slots), both recorded inside an
ontology.  Entirely inert unless a document or caller uses it, so
first-order behaviour is unchanged."""

from __future__ import annotations

from dataclasses import dataclass, field

from .diagnostics import Diagnostic
from .errors import KindMismatch, UnresolvedTypeRef
from .model import KnowledgeBase, Ontology, TypeDecl, _ref_name, same_family


@dataclass
class TypeClassification:
    """instance-type pair where the instance is itself a type."""

    instance: str
    metatype: str
    pos: tuple[str, int, int] | None = field(default=None, compare=False, repr=False)

    def fact(self):
        return ("ho-cls", self.instance, self.metatype)


@dataclass
class OwnSlot:
    """An individual relation instance between types, held by the ontology."""

    relation_type: str
    source: str
    target: str
    pos: tuple[str, int, int] | None = field(default=None, compare=False, repr=False)

    def fact(self):
        return ("ho-own", self.relation_type, self.source, self.target)


def classify_type(ont: Ontology, t, metatype, pos=None) -> None:
    """Record that type ``t`` is an instance of ``metatype``.

    Both sides must be entity types, or both relation-family types; mixing
    the dimensions is rejected.  Towers (metatypes of metatypes) are fine.
    """
    t_name, m_name = _ref_name(t), _ref_name(metatype)
    td, md = ont.try_resolve_type(t_name), ont.try_resolve_type(m_name)
    if ont.strict:
        if td is None:
            raise UnresolvedTypeRef("unknown type %r" % t_name, pos)
        if md is None:
            raise UnresolvedTypeRef("unknown type %r" % m_name, pos)
    if td is not None and md is not None and not same_family(td, md):
        raise KindMismatch(
            "type classification cannot cross the entity/relation dimension (%s : %s)" % (t_name, m_name),
            pos,
        )
    assertion = TypeClassification(t_name, m_name, pos=pos)
    if assertion not in ont.ho_assertions:
        ont.ho_assertions.append(assertion)


def assert_own_slot(ont: Ontology, relation_type, source, target, pos=None) -> None:
    """Record an individual relation instance between two type or individual
    names inside the ontology."""
    r_name = _ref_name(relation_type)
    if ont.try_resolve_type(r_name) is None:
        raise UnresolvedTypeRef("own slot uses undeclared relation type %r" % r_name, pos)
    ont.ho_assertions.append(OwnSlot(r_name, _ref_name(source), _ref_name(target), pos=pos))


def type_classifications(ont: Ontology) -> list[TypeClassification]:
    return [a for a in ont.ho_assertions if isinstance(a, TypeClassification)]


def own_slots(ont: Ontology) -> list[OwnSlot]:
    return [a for a in ont.ho_assertions if isinstance(a, OwnSlot)]


def check_higher_order_classification(ont: Ontology) -> list[Diagnostic]:
    """For every relation-type classification s:r with s : g -> d and
    r : a -> b, the endpoint classifications g:a and d:b must also be
    recorded; each missing premise is a warning."""
    diags: list[Diagnostic] = []
    recorded = {(a.instance, a.metatype) for a in type_classifications(ont)}

    def classified(inst: TypeDecl, typ: TypeDecl) -> bool:
        return (ont.name_for(inst), ont.name_for(typ)) in recorded or (inst.name, typ.name) in recorded

    for assertion in type_classifications(ont):
        s = ont.try_resolve_type(assertion.instance)
        r = ont.try_resolve_type(assertion.metatype)
        if s is None or r is None or not (s.is_relation and r.is_relation):
            continue
        if s.source_type is None or r.source_type is None:
            continue
        g, d = ont.try_resolve_type(s.source_type), ont.try_resolve_type(s.target_type)
        a, b = ont.try_resolve_type(r.source_type), ont.try_resolve_type(r.target_type)
        missing = []
        if g is None or a is None or not classified(g, a):
            missing.append("%s : %s" % (s.source_type, r.source_type))
        if d is None or b is None or not classified(d, b):
            missing.append("%s : %s" % (s.target_type, r.target_type))
        if missing:
            diags.append(
                Diagnostic(
                    "warning",
                    "HOT001",
                    "relation-type classification %s : %s lacks endpoint classification(s) %s"
                    % (assertion.instance, assertion.metatype, ", ".join(missing)),
                    assertion.pos,
                )
            )
    return diags


def check_name_collisions(kb: KnowledgeBase) -> list[Diagnostic]:
    """A name must resolve as a type or as an individual, never both."""
    diags: list[Diagnostic] = []
    if kb.ontology is None:
        return diags
    type_names = {d.name for d in kb.ontology.all_types()}
    for coll in kb.collections:
        for obj in coll.objects:
            if obj.id is not None and obj.id in type_names:
                diags.append(
                    Diagnostic(
                        "error",
                        "HOT002",
                        "instance id %r collides with a declared type name" % obj.id,
                        obj.pos,
                    )
                )
    return diags
