"""Closure computation and consistency checks over a knowledge base.

The subtype relation is closed reflexively and transitively per kind
family; classifications are closed under it.  On top of the closures, the
checks enforce, with diagnostics rather than exceptions:

  * preservation of classification: a classified relation instance needs
    correspondingly classified endpoints (strict mode rejects, lenient
    "completion" mode infers the missing endpoint classifications);
  * preservation of entailment: a subtype axiom between signed relation
    types needs subtyped endpoints (warning);
  * derived disjointness and incoherence: disjoint or incoherent entity
    types contaminate the relation types built on them, and any type below
    two disjoint types is itself incoherent;
  * inclusion implies subtype, as a lint: a populated relation extension
    contained in another suggests a missing subtype axiom.

Cycles in the declared subtype graph are allowed; they make the members
equivalent and are reported as info.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .diagnostics import Diagnostic, sort_diagnostics
from .model import (
    FunctionInstance,
    KnowledgeBase,
    Literal,
    ObjectInstance,
    Ontology,
    TypeDecl,
    TypeKind,
    family_root,
    natno_lexical_ok,
    resolve_source,
    resolve_target,
)

Pair = tuple


@dataclass
class ClosureTables:
    subtype_pairs: set = field(default_factory=set)  # (TypeDecl, TypeDecl)
    entity_class_pairs: set = field(default_factory=set)  # (endpoint, TypeDecl)
    relation_class_pairs: set = field(default_factory=set)  # ((src, tgt), TypeDecl)
    derived_disjoint: set = field(default_factory=set)  # frozenset of TypeDecl
    derived_incoherent: set = field(default_factory=set)  # TypeDecl


def _resolved_axioms(ont: Ontology) -> list[tuple[TypeDecl, TypeDecl]]:
    pairs = []
    for ax in ont.axioms:
        s = ont.try_resolve_type(ax.specific)
        if s is None:
            continue
        g = ont.try_resolve_type(ax.generic) if ax.generic is not None else family_root(s)
        if g is None or s.is_entity != g.is_entity:
            continue
        pairs.append((s, g))
    return pairs


def subtype_closure(ont: Ontology | None) -> set[Pair]:
    """Least reflexive-transitive relation containing the declared axioms.

    The reflexive domain is every declared type (local and imported) plus
    every resolvable axiom endpoint; DFS reachability per node.
    """
    if ont is None:
        return set()
    declared = _resolved_axioms(ont)
    domain: list[TypeDecl] = list(ont.all_types())
    for s, g in declared:
        for t in (s, g):
            if all(t is not d for d in domain):
                domain.append(t)
    succ: dict[int, list[TypeDecl]] = {}
    for s, g in declared:
        succ.setdefault(id(s), []).append(g)
    closure: set[Pair] = set()
    for start in domain:
        stack = [start]
        reached: set[int] = set()
        while stack:
            t = stack.pop()
            if id(t) in reached:
                continue
            reached.add(id(t))
            closure.add((start, t))
            stack.extend(succ.get(id(t), ()))
    return closure


def _supertype_map(pairs: set[Pair]) -> dict[TypeDecl, set[TypeDecl]]:
    supers: dict[TypeDecl, set[TypeDecl]] = {}
    for a, b in pairs:
        supers.setdefault(a, set()).add(b)
    return supers


def classification_closure(kb: KnowledgeBase, subtype_pairs: set[Pair] | None = None) -> tuple[set, set]:
    """Stored classifications composed with the subtype closure.

    Returns ``(entity_pairs, relation_pairs)``: entity pairs are
    (instance-or-literal, type), relation pairs key relation and function
    instances by their resolved (source, target) endpoint pair.
    """
    ont = kb.ontology
    if subtype_pairs is None:
        subtype_pairs = subtype_closure(ont)
    supers = _supertype_map(subtype_pairs)
    entity_pairs: set = set()
    relation_pairs: set = set()
    type_names = {d.name for d in ont.all_types()} if ont is not None else set()

    def close(decl: TypeDecl):
        return {decl} | supers.get(decl, set())

    def add_literal(value):
        if isinstance(value, Literal) and ont is not None:
            decl = ont.try_resolve_type(value.datatype)
            if decl is not None:
                for t in close(decl):
                    entity_pairs.add((value, t))

    for coll in kb.collections:
        for obj in coll.objects:
            for name in obj.classifications:
                decl = ont.try_resolve_type(name) if ont is not None else None
                if decl is not None and decl.is_entity:
                    for t in close(decl):
                        entity_pairs.add((obj, t))
            for record in list(obj.relation_instances) + list(obj.function_instances):
                src = resolve_source(coll, record)
                tgt = resolve_target(kb, coll, record)
                if kb.higher_order and (
                    (isinstance(src, str) and src in type_names) or (isinstance(tgt, str) and tgt in type_names)
                ):
                    continue  # type-endpoint instances stay out of first-order extensions
                add_literal(tgt)
                names = [record.function_type] if isinstance(record, FunctionInstance) else record.classifications
                pair = (src, tgt)
                for name in names:
                    if name is None:
                        continue
                    decl = ont.try_resolve_type(name) if ont is not None else None
                    if decl is not None and decl.is_relation:
                        for t in close(decl):
                            relation_pairs.add((pair, t))
    return entity_pairs, relation_pairs


def derive_incompatible_and_incoherent(
    ont: Ontology | None, subtype_pairs: set[Pair] | None = None
) -> tuple[set, set]:
    """Fixpoint of the contamination rules over declared disjointness and
    incoherence:

      1. disjoint sources or targets make two signed relation types disjoint;
      2. an incoherent source or target makes a relation type incoherent;
      3. a type below both members of a disjoint pair is incoherent.
    """
    if ont is None:
        return set(), set()
    if subtype_pairs is None:
        subtype_pairs = subtype_closure(ont)
    disjoint: set[frozenset] = set()
    for pair in ont.disjointness:
        decls = [ont.try_resolve_type(n) for n in pair]
        if all(d is not None for d in decls):
            disjoint.add(frozenset(decls))
    incoherent: set[TypeDecl] = set()
    for n in ont.incoherent:
        decl = ont.try_resolve_type(n)
        if decl is not None:
            incoherent.add(decl)

    signed = []
    for decl in ont.all_types():
        if decl.is_relation and decl.source_type and decl.target_type:
            s = ont.try_resolve_type(decl.source_type)
            t = ont.try_resolve_type(decl.target_type)
            if s is not None and t is not None:
                signed.append((decl, s, t))

    def are_disjoint(x, y):
        return frozenset((x, y)) in disjoint

    changed = True
    while changed:
        changed = False
        for rho, a, b in signed:
            for sigma, g, d in signed:
                if are_disjoint(a, g) or are_disjoint(b, d):
                    pair = frozenset((rho, sigma))
                    if pair not in disjoint:
                        disjoint.add(pair)
                        changed = True
            if (a in incoherent or b in incoherent) and rho not in incoherent:
                incoherent.add(rho)
                changed = True
        for tau, x in subtype_pairs:
            for tau2, y in subtype_pairs:
                if tau is tau2 and are_disjoint(x, y) and tau not in incoherent:
                    incoherent.add(tau)
                    changed = True
    return disjoint, incoherent


def compute_closures(kb: KnowledgeBase) -> ClosureTables:
    tables = ClosureTables()
    tables.subtype_pairs = subtype_closure(kb.ontology)
    tables.entity_class_pairs, tables.relation_class_pairs = classification_closure(kb, tables.subtype_pairs)
    tables.derived_disjoint, tables.derived_incoherent = derive_incompatible_and_incoherent(
        kb.ontology, tables.subtype_pairs
    )
    return tables


# -- diagnostics passes ------------------------------------------------------


def _sev(mode: str) -> str:
    return "error" if mode == "strict" else "warning"


def _endpoint_label(x) -> str:
    if isinstance(x, ObjectInstance):
        return x.id or x.about or "(anonymous)"
    if isinstance(x, Literal):
        return '"%s"' % x.lexical
    return str(x)


def structural_check(kb: KnowledgeBase, mode: str = "lenient") -> list[Diagnostic]:
    """Reference integrity, id uniqueness, literal well-formedness and
    function single-valuedness, deferred here by lenient construction."""
    diags: list[Diagnostic] = []
    ont = kb.ontology

    def unresolved(name: str, what: str, pos) -> None:
        diags.append(Diagnostic(_sev(mode), "REF001", "unresolved type %r in %s" % (name, what), pos))

    if ont is not None:
        for decl in ont.types.values():
            if decl.is_relation:
                for ref in (decl.source_type, decl.target_type):
                    if ref is not None and ont.try_resolve_type(ref) is None:
                        unresolved(ref, "declaration of %r" % decl.name, decl.pos)
        for ax in ont.axioms:
            if ont.try_resolve_type(ax.specific) is None:
                unresolved(ax.specific, "subtype axiom", ax.pos)
            if ax.generic is not None and ont.try_resolve_type(ax.generic) is None:
                unresolved(ax.generic, "subtype axiom", ax.pos)
        for pair in ont.disjointness:
            for n in pair:
                if ont.try_resolve_type(n) is None:
                    unresolved(n, "disjointness declaration", None)
        for n in ont.incoherent:
            if ont.try_resolve_type(n) is None:
                unresolved(n, "incoherence declaration", None)

    for coll in kb.collections:
        seen_ids: set[str] = set()
        for obj in coll.objects:
            if obj.id is not None:
                if obj.id in seen_ids:
                    diags.append(
                        Diagnostic(_sev(mode), "DUP001", "duplicate instance id %r" % obj.id, obj.pos)
                    )
                seen_ids.add(obj.id)
            for name in obj.classifications:
                if ont is not None and ont.try_resolve_type(name) is None:
                    unresolved(name, "classification of %r" % _endpoint_label(obj), obj.pos)
            fn_seen: dict[tuple, int] = {}
            for record in list(obj.relation_instances) + list(obj.function_instances):
                names = (
                    [record.function_type]
                    if isinstance(record, FunctionInstance)
                    else record.classifications
                )
                for name in names:
                    if name is None:
                        diags.append(
                            Diagnostic(
                                "warning", "FUN002", "function instance has no classification", record.pos
                            )
                        )
                    elif ont is not None and ont.try_resolve_type(name) is None:
                        unresolved(name, "instance classification", record.pos)
                src = resolve_source(coll, record)
                if isinstance(src, str):
                    diags.append(
                        Diagnostic(
                            _sev(mode), "REF002", "source %r is not an instance in the collection" % src, record.pos
                        )
                    )
                tgt = resolve_target(kb, coll, record)
                if isinstance(tgt, str) and not (kb.higher_order and _is_type_name(kb, tgt)):
                    natno_only = _expects_natno_only(kb, record)
                    if natno_only and not natno_lexical_ok(tgt):
                        diags.append(
                            Diagnostic(
                                _sev(mode),
                                "LIT001",
                                "%r is not a valid Natno literal" % tgt,
                                record.pos,
                            )
                        )
                    else:
                        diags.append(
                            Diagnostic(
                                _sev(mode), "REF002", "target %r is not an instance in the collection" % tgt, record.pos
                            )
                        )
                if isinstance(record, FunctionInstance) and record.function_type is not None:
                    key = (id(record.source), record.function_type)
                    fn_seen[key] = fn_seen.get(key, 0) + 1
                    if fn_seen[key] == 2:
                        diags.append(
                            Diagnostic(
                                _sev(mode),
                                "FUN001",
                                "function %r has more than one value for %r"
                                % (record.function_type, _endpoint_label(resolve_source(coll, record))),
                                record.pos,
                            )
                        )
    return diags


def _is_type_name(kb: KnowledgeBase, name: str) -> bool:
    return kb.ontology is not None and any(d.name == name for d in kb.ontology.all_types())


def _expects_natno_only(kb: KnowledgeBase, record) -> bool:
    ont = kb.ontology
    if ont is None:
        return False
    names = [record.function_type] if isinstance(record, FunctionInstance) else record.classifications
    targets = []
    for name in names:
        if name is None:
            continue
        decl = ont.try_resolve_type(name)
        if decl is None or not decl.is_relation or decl.target_type is None:
            return False
        tt = ont.try_resolve_type(decl.target_type)
        if tt is None or tt.kind is not TypeKind.DATA:
            return False
        targets.append(tt.name)
    return bool(targets) and all(t == "Natno" for t in targets)


def subtype_cycles(ont: Ontology | None) -> list[Diagnostic]:
    """Mutually subtyped groups, reported as info."""
    if ont is None:
        return []
    pairs = subtype_closure(ont)
    groups: dict[int, set[TypeDecl]] = {}
    for a, b in pairs:
        if a is not b and (b, a) in pairs:
            merged = groups.get(id(a), {a}) | groups.get(id(b), {b})
            for m in merged:
                groups[id(m)] = merged
    seen: set[int] = set()
    diags = []
    for group in groups.values():
        if id(group) in seen:
            continue
        seen.add(id(group))
        names = ", ".join(sorted(t.name for t in group))
        diags.append(Diagnostic("info", "SUB001", "types {%s} are mutually subtyped (equivalent)" % names))
    return sorted(diags, key=lambda d: d.message)


def check_preservation_of_classification(
    kb: KnowledgeBase, tables: ClosureTables | None = None, mode: str = "lenient"
) -> list[Diagnostic]:
    """r:rho with rho : alpha -> beta needs source:alpha and target:beta.

    Strict mode emits an error per missing endpoint classification; lenient
    mode infers the missing classification into the closure tables and
    reports the inference as info, so a re-run over the completed tables is
    clean.
    """
    if tables is None:
        tables = compute_closures(kb)
    ont = kb.ontology
    if ont is None:
        return []
    diags: list[Diagnostic] = []
    supers = _supertype_map(tables.subtype_pairs)

    def holds(endpoint, typ: TypeDecl) -> bool:
        return (endpoint, typ) in tables.entity_class_pairs

    def infer(endpoint, typ: TypeDecl):
        tables.entity_class_pairs.add((endpoint, typ))
        for t in supers.get(typ, ()):
            tables.entity_class_pairs.add((endpoint, t))

    ordered = sorted(
        tables.relation_class_pairs,
        key=lambda item: (_endpoint_label(item[0][0]), _endpoint_label(item[0][1]), item[1].name),
    )
    for (src, tgt), rho in ordered:
        for endpoint, type_ref, side in ((src, rho.source_type, "source"), (tgt, rho.target_type, "target")):
            if type_ref is None:
                continue
            expected = ont.try_resolve_type(type_ref)
            if expected is None or isinstance(endpoint, str):
                continue  # unresolved pieces are reported by the structural pass
            if holds(endpoint, expected):
                continue
            if mode == "strict":
                diags.append(
                    Diagnostic(
                        "error",
                        "CLS001",
                        "%s %s of %s instance is not classified %s"
                        % (side, _endpoint_label(endpoint), rho.name, type_ref),
                    )
                )
            else:
                if isinstance(endpoint, Literal):
                    # a literal's classification is fixed by its datatype
                    diags.append(
                        Diagnostic(
                            "warning",
                            "CLS001",
                            "literal %s cannot be classified %s" % (_endpoint_label(endpoint), type_ref),
                        )
                    )
                    continue
                infer(endpoint, expected)
                diags.append(
                    Diagnostic(
                        "info",
                        "CLS002",
                        "inferred classification %s : %s from %s instance"
                        % (_endpoint_label(endpoint), type_ref, rho.name),
                    )
                )
    return diags


def check_preservation_of_entailment(ont: Ontology | None, tables: ClosureTables | None = None) -> list[Diagnostic]:
    """sigma entails rho only if their sources and targets do too."""
    if ont is None:
        return []
    if tables is None:
        tables = ClosureTables(subtype_pairs=subtype_closure(ont))
    diags = []
    for s, g in _resolved_axioms(ont):
        if not (s.is_relation and g.is_relation):
            continue
        if not all((s.source_type, s.target_type, g.source_type, g.target_type)):
            continue
        gamma, delta = ont.try_resolve_type(s.source_type), ont.try_resolve_type(s.target_type)
        alpha, beta = ont.try_resolve_type(g.source_type), ont.try_resolve_type(g.target_type)
        if None in (gamma, delta, alpha, beta):
            continue
        missing = []
        if (gamma, alpha) not in tables.subtype_pairs:
            missing.append("%s is not a subtype of %s" % (s.source_type, g.source_type))
        if (delta, beta) not in tables.subtype_pairs:
            missing.append("%s is not a subtype of %s" % (s.target_type, g.target_type))
        if missing:
            diags.append(
                Diagnostic(
                    "warning",
                    "ENT001",
                    "subtype %s < %s may be unsound: %s" % (s.name, g.name, "; ".join(missing)),
                )
            )
    return diags


def incoherence_diagnostics(ont: Ontology | None, tables: ClosureTables) -> list[Diagnostic]:
    if ont is None:
        return []
    declared = {ont.try_resolve_type(n) for n in ont.incoherent}
    diags = []
    for decl in sorted(tables.derived_incoherent, key=lambda d: d.name):
        if decl not in declared:
            diags.append(Diagnostic("warning", "INC001", "type %r is incoherent (derived)" % decl.name))
    return diags


def lint_inclusion_implies_subtype(kb: KnowledgeBase, tables: ClosureTables | None = None) -> list[Diagnostic]:
    """Populated extension inclusion without the matching axiom is worth a
    suggestion; empty extensions are skipped to avoid vacuous noise."""
    if tables is None:
        tables = compute_closures(kb)
    ont = kb.ontology
    if ont is None:
        return []
    extensions: dict[TypeDecl, set] = {}
    for pair, decl in tables.relation_class_pairs:
        extensions.setdefault(decl, set()).add(pair)
    diags = []
    for sigma in sorted(extensions, key=lambda d: d.name):
        for rho in sorted(extensions, key=lambda d: d.name):
            if sigma is rho:
                continue
            if not extensions[sigma]:
                continue
            if (sigma, rho) in tables.subtype_pairs:
                continue
            if extensions[sigma] <= extensions[rho]:
                diags.append(
                    Diagnostic(
                        "info",
                        "SUG001",
                        "every %s instance is also classified %s; consider declaring the subtype"
                        % (sigma.name, rho.name),
                    )
                )
    return diags


def run_all(kb: KnowledgeBase, mode: str = "lenient") -> list[Diagnostic]:
    """Every pass, in a stable order."""
    from . import hot  # late import; hot depends on model only

    diags = structural_check(kb, mode)
    diags += subtype_cycles(kb.ontology)
    tables = compute_closures(kb)
    diags += check_preservation_of_classification(kb, tables, mode)
    diags += check_preservation_of_entailment(kb.ontology, tables)
    diags += incoherence_diagnostics(kb.ontology, tables)
    if kb.higher_order and kb.ontology is not None:
        diags += hot.check_higher_order_classification(kb.ontology)
        diags += hot.check_name_collisions(kb)
    return sort_diagnostics(diags)
