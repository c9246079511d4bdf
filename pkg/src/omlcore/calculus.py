"""Identity, composition and transposition on binary relation types, with
extensions evaluated over a knowledge base.

Derived types are anonymous expression values; they are not registered in
the ontology unless ``register_derived`` is called with a fresh name, which
keeps document serialization closed under the core grammar.

Composition is in diagram order: ``Compose(r, s)`` first follows ``r`` and
then ``s``, so it requires ``target(r) == source(s)``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DuplicateTypeName, KindMismatch, NotComposable, UnresolvedTypeRef
from .model import KnowledgeBase, Literal, ObjectInstance, Ontology, TypeDecl


@dataclass(frozen=True)
class Identity:
    entity_type: TypeDecl


@dataclass(frozen=True)
class Compose:
    first: object
    second: object


@dataclass(frozen=True)
class Transpose:
    inner: object


# RelationExpr = TypeDecl | Identity | Compose | Transpose


def _endpoint(ont: Ontology, expr, side: int):
    """The source (side 0) or target (side 1) of an expression: the resolved
    entity declaration, or the dangling name when it does not resolve."""
    if isinstance(expr, TypeDecl):
        if not expr.is_relation:
            raise KindMismatch("%r is not a relation type" % expr.name)
        ref = expr.source_type if side == 0 else expr.target_type
        if ref is None:
            raise UnresolvedTypeRef("relation type %r carries no signature" % expr.name)
        decl = ont.try_resolve_type(ref)
        return decl if decl is not None else ref
    if isinstance(expr, Identity):
        return expr.entity_type
    if isinstance(expr, Compose):
        return _endpoint(ont, expr.first if side == 0 else expr.second, side)
    if isinstance(expr, Transpose):
        return _endpoint(ont, expr.inner, 1 - side)
    raise TypeError("not a relation expression: %r" % (expr,))


def source_of(ont: Ontology, expr) -> TypeDecl:
    out = _endpoint(ont, expr, 0)
    if isinstance(out, str):
        raise UnresolvedTypeRef("cannot resolve %r in relation signature" % out)
    return out


def target_of(ont: Ontology, expr) -> TypeDecl:
    out = _endpoint(ont, expr, 1)
    if isinstance(out, str):
        raise UnresolvedTypeRef("cannot resolve %r in relation signature" % out)
    return out


def source_name(ont: Ontology, expr) -> str:
    out = _endpoint(ont, expr, 0)
    return out if isinstance(out, str) else ont.name_for(out)


def target_name(ont: Ontology, expr) -> str:
    out = _endpoint(ont, expr, 1)
    return out if isinstance(out, str) else ont.name_for(out)


def identity_type(ont: Ontology, entity) -> Identity:
    decl = entity if isinstance(entity, TypeDecl) else ont.resolve_type(entity)
    if not decl.is_entity:
        raise KindMismatch("identity is defined on entity types, not %r" % decl.name)
    return Identity(decl)


def _as_relation_expr(ont: Ontology, expr):
    if isinstance(expr, str):
        expr = ont.resolve_type(expr)
    if isinstance(expr, TypeDecl) and not expr.is_relation:
        raise KindMismatch("%r is not a relation type" % expr.name)
    return expr


def compose_types(ont: Ontology, first, second, lenient: bool = False) -> Compose:
    """Composable when target(first) is source(second).  Unresolved endpoint
    names compare by spelling; with ``lenient``, a target that is a declared
    subtype of the source is accepted too."""
    first = _as_relation_expr(ont, first)
    second = _as_relation_expr(ont, second)
    mid_out = _endpoint(ont, first, 1)
    mid_in = _endpoint(ont, second, 0)
    if isinstance(mid_out, str) or isinstance(mid_in, str):
        ok = isinstance(mid_out, str) and isinstance(mid_in, str) and mid_out == mid_in
    else:
        ok = mid_out is mid_in
        if not ok and lenient:
            from .checker import subtype_closure

            ok = (mid_out, mid_in) in subtype_closure(ont)
    if not ok:
        raise NotComposable(
            "cannot compose: target %r does not match source %r"
            % (target_name(ont, first), source_name(ont, second))
        )
    return Compose(first, second)


def transpose_type(ont: Ontology, expr):
    """Swap source and target.  Structural laws are applied on the nose:
    a double transpose unwraps and an identity is its own transpose."""
    expr = _as_relation_expr(ont, expr)
    if isinstance(expr, Transpose):
        return expr.inner
    if isinstance(expr, Identity):
        return expr
    return Transpose(expr)


def register_derived(ont: Ontology, name: str, expr) -> None:
    """Give a derived relation expression a name in the ontology."""
    if name in ont.types or name in ont.derived:
        raise DuplicateTypeName("name %r already in use" % name)
    ont.derived[name] = expr


def relation_extension(kb: KnowledgeBase, expr, tables=None) -> set:
    """The set of endpoint pairs in the expression's extension, computed
    from the classification closure: a declared type collects its classified
    pairs, identity is the diagonal of the entity type's extension,
    composition is a relational join, transposition swaps."""
    from . import checker

    if tables is None:
        tables = checker.compute_closures(kb)
    ont = kb.ontology
    if isinstance(expr, str):
        expr = ont.resolve_type(expr)
    if isinstance(expr, TypeDecl):
        if not expr.is_relation:
            raise KindMismatch("%r is not a relation type" % expr.name)
        return {pair for pair, decl in tables.relation_class_pairs if decl is expr}
    if isinstance(expr, Identity):
        return {(e, e) for e, decl in tables.entity_class_pairs if decl is expr.entity_type}
    if isinstance(expr, Compose):
        left = relation_extension(kb, expr.first, tables)
        right = relation_extension(kb, expr.second, tables)
        by_source: dict = {}
        for b, c in right:
            by_source.setdefault(_join_key(b), []).append(c)
        return {(a, c) for a, b in left for c in by_source.get(_join_key(b), ())}
    if isinstance(expr, Transpose):
        return {(b, a) for a, b in relation_extension(kb, expr.inner, tables)}
    raise TypeError("not a relation expression: %r" % (expr,))


def _join_key(x):
    if isinstance(x, ObjectInstance):
        return ("obj", id(x))
    if isinstance(x, Literal):
        return ("lit", x.datatype, x.lexical)
    return ("name", x)
