"""Independent brute-force oracles the implementation is checked against.

Everything here is written the dumb way on purpose: full rescans until
nothing changes, nested-loop joins, no sharing with the library's own
closure or extension code paths.
"""

from omlcore.model import (
    ENTITY_ROOT,
    RELATION_ROOT,
    FunctionInstance,
    resolve_source,
    resolve_target,
)


def naive_subtype_closure(edges, domain):
    """Reflexive-transitive closure by iterating the one-step rule."""
    closure = set(edges)
    for t in domain:
        closure.add((t, t))
    for a, b in list(closure):
        closure.add((a, a))
        closure.add((b, b))
    changed = True
    while changed:
        changed = False
        for a, b in list(closure):
            for c, d in list(closure):
                if b is c and (a, d) not in closure:
                    closure.add((a, d))
                    changed = True
    return closure


def naive_join(left, right):
    out = set()
    for a, b in left:
        for c, d in right:
            if _same_endpoint(b, c):
                out.add((a, d))
    return out


def _same_endpoint(x, y):
    if type(x) is not type(y):
        return False
    if isinstance(x, str):
        return x == y
    return x is y or x == y


def naive_classification_closure(stored, subtype_pairs):
    """stored is a set of (thing, type); compose with the subtype closure."""
    out = set(stored)
    changed = True
    while changed:
        changed = False
        for thing, t1 in list(out):
            for a, b in subtype_pairs:
                if a is t1 and (thing, b) not in out:
                    out.add((thing, b))
                    changed = True
    return out


def naive_contamination_fixpoint(signed, subtype_pairs, disjoint0, incoherent0):
    """The three contamination rules, rescanned until stable.

    ``signed`` is a list of (relation type, source decl, target decl).
    """
    disjoint = set(disjoint0)
    incoherent = set(incoherent0)
    changed = True
    while changed:
        changed = False
        for rho, a, b in signed:
            for sigma, g, d in signed:
                if frozenset((a, g)) in disjoint or frozenset((b, d)) in disjoint:
                    if frozenset((rho, sigma)) not in disjoint:
                        disjoint.add(frozenset((rho, sigma)))
                        changed = True
        for rho, a, b in signed:
            if (a in incoherent or b in incoherent) and rho not in incoherent:
                incoherent.add(rho)
                changed = True
        for tau, x in subtype_pairs:
            for tau2, y in subtype_pairs:
                if tau is tau2 and frozenset((x, y)) in disjoint and tau not in incoherent:
                    incoherent.add(tau)
                    changed = True
    return disjoint, incoherent


def stored_relation_facts(kb):
    """(pair, type decl) for every stored classification of every relation
    or function record, resolved straight off the records."""
    ont = kb.ontology
    facts = set()
    for coll in kb.collections:
        for obj in coll.objects:
            for record in list(obj.relation_instances) + list(obj.function_instances):
                names = (
                    [record.function_type]
                    if isinstance(record, FunctionInstance)
                    else record.classifications
                )
                pair = (resolve_source(coll, record), resolve_target(kb, coll, record))
                for name in names:
                    if name is None:
                        continue
                    decl = ont.try_resolve_type(name) if ont else None
                    if decl is not None and decl.is_relation:
                        facts.add((pair, decl))
    return facts


def stored_entity_facts(kb):
    ont = kb.ontology
    facts = set()
    for coll in kb.collections:
        for obj in coll.objects:
            for name in obj.classifications:
                decl = ont.try_resolve_type(name) if ont else None
                if decl is not None and decl.is_entity:
                    facts.add((obj, decl))
    return facts


def brute_extension(kb, expr, closure=None):
    """Extension of a relation expression from first principles: naive
    closures over the stored records plus nested-loop joins."""
    from omlcore.calculus import Compose, Identity, Transpose
    from omlcore.model import Literal, TypeDecl

    ont = kb.ontology
    if closure is None:
        edges = []
        for ax in ont.axioms:
            s = ont.try_resolve_type(ax.specific)
            if s is None:
                continue
            g = ont.try_resolve_type(ax.generic) if ax.generic else (ENTITY_ROOT if s.is_entity else RELATION_ROOT)
            if g is not None and s.is_entity == g.is_entity:
                edges.append((s, g))
        closure = naive_subtype_closure(edges, ont.all_types())
    if isinstance(expr, TypeDecl):
        facts = naive_classification_closure(stored_relation_facts(kb), closure)
        return {pair for pair, decl in facts if decl is expr}
    if isinstance(expr, Identity):
        stored = set(stored_entity_facts(kb))
        for coll in kb.collections:
            for obj in coll.objects:
                for record in list(obj.relation_instances) + list(obj.function_instances):
                    tgt = resolve_target(kb, coll, record)
                    if isinstance(tgt, Literal):
                        decl = ont.try_resolve_type(tgt.datatype)
                        if decl is not None:
                            stored.add((tgt, decl))
        closed = naive_classification_closure(stored, closure)
        return {(e, e) for e, decl in closed if decl is expr.entity_type}
    if isinstance(expr, Compose):
        return naive_join(brute_extension(kb, expr.first, closure), brute_extension(kb, expr.second, closure))
    if isinstance(expr, Transpose):
        return {(b, a) for a, b in brute_extension(kb, expr.inner, closure)}
    raise AssertionError(expr)



def minimal_types_brute(decls, closure):
    """Minimal elements: nothing else in the set sits strictly below."""
    out = []
    for d in decls:
        below = [
            o for o in decls if o is not d and (o, d) in closure and (d, o) not in closure
        ]
        if not below:
            out.append(d)
    return out
