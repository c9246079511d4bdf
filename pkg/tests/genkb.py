"""Seeded random generators for ontologies, collections and document text.

Document text generation deliberately randomizes surface form (tag
synonyms, the optional OML: prefix, whitespace, explicit close tags,
escaped characters) so canonicalization gets exercised on inputs the
canonical serializer would never produce itself.
"""

import random

from omlcore.model import Collection, KnowledgeBase, Ontology, TypeKind


def random_ontology(
    rng: random.Random,
    max_types: int = 8,
    max_axioms: int = 20,
    allow_disjoint: bool = True,
    allow_functions: bool = True,
    relation_axioms: bool = True,
    data_targets: bool = True,
) -> Ontology:
    ont = Ontology(name="gen")
    n_objects = rng.randint(1, max(1, max_types // 2))
    n_relations = rng.randint(0, max_types - n_objects)
    objects = [ont.declare_type(TypeKind.OBJECT, "T%d" % i) for i in range(n_objects)]
    relations = []
    for i in range(n_relations):
        kind = TypeKind.FUNCTION if allow_functions and rng.random() < 0.4 else TypeKind.BINARY_RELATION
        source = rng.choice(objects)
        if kind is TypeKind.FUNCTION and data_targets and rng.random() < 0.5:
            target = rng.choice(["String", "Natno"])
        else:
            target = rng.choice(objects).name
        relations.append(ont.declare_type(kind, "r%d" % i, source=source.name, target=target))
    for _ in range(rng.randint(0, max_axioms)):
        family = relations if relation_axioms and relations and rng.random() < 0.4 else objects
        specific = rng.choice(family)
        pool = family + ([None] if rng.random() < 0.15 else [])
        generic = rng.choice(pool)
        ont.declare_subtype(specific.name, generic.name if generic else None)
    if allow_disjoint and rng.random() < 0.5:
        for _ in range(rng.randint(1, 3)):
            family = objects if not relations or rng.random() < 0.7 else relations
            a, b = rng.choice(family), rng.choice(family)
            ont.declare_disjoint(a.name, b.name)
    if allow_disjoint and rng.random() < 0.2 and objects:
        ont.declare_incoherent(rng.choice(objects).name)
    return ont


def random_collection(rng: random.Random, ont: Ontology, max_instances: int = 30) -> Collection:
    coll = Collection()
    objects = [d for d in ont.types.values() if d.kind is TypeKind.OBJECT]
    relations = [d for d in ont.types.values() if d.is_relation]
    n = rng.randint(1, max(1, max_instances // 3))
    instances = []
    for i in range(n):
        obj = coll.add_object("i%d" % i)
        instances.append(obj)
        for decl in rng.sample(objects, k=rng.randint(0, min(2, len(objects)))):
            obj.classify(decl.name)
    budget = max_instances - n
    for _ in range(budget):
        if not relations or not instances:
            break
        obj = rng.choice(instances)
        decl = rng.choice(relations)
        target_decl = ont.try_resolve_type(decl.target_type)
        if target_decl is not None and target_decl.kind is TypeKind.DATA:
            target = str(rng.randint(0, 999)) if target_decl.name == "Natno" else "v%d" % rng.randint(0, 99)
        else:
            target = rng.choice(instances).id if rng.random() < 0.8 else "free%d" % rng.randint(0, 9)
        if decl.kind is TypeKind.FUNCTION:
            if any(f.function_type == decl.name and f.source is obj for f in obj.function_instances):
                continue
            coll.add_function_instance(obj, decl.name, target)
        else:
            coll.add_relation_instance(obj, target, [decl.name])
    return coll


def random_kb(rng: random.Random, **kwargs) -> KnowledgeBase:
    ont = random_ontology(rng, **kwargs)
    return KnowledgeBase(ont, [random_collection(rng, ont)])


def random_interop_kb(rng: random.Random, xol: bool = False) -> KnowledgeBase:
    """KBs inside the fragment both exchange formats can express: every
    object carries an id, no disjointness or incoherence, and (for the
    frame-exchange format) no relation-level axioms."""
    ont = random_ontology(
        rng,
        max_types=6,
        max_axioms=6,
        allow_disjoint=False,
        relation_axioms=not xol,
    )
    return KnowledgeBase(ont, [random_collection(rng, ont, max_instances=15)])


# -- randomized document text --------------------------------------------------


def _ws(rng):
    return rng.choice(["", " ", "\n  ", "\n\t"])


def _tag(rng, canonical: str) -> str:
    synonyms = {
        "Type.Object": ["Type.Object", "Type.Entity"],
        "Instance.Object": ["Instance.Object", "Instance.Entity"],
    }
    name = rng.choice(synonyms.get(canonical, [canonical]))
    return ("OML:" if rng.random() < 0.2 else "") + name


def _elem(rng, tag: str, attrs: list, children: list | None = None) -> str:
    spelled = _tag(rng, tag)
    attr_text = "".join(' %s="%s"' % (k, v) for k, v in attrs)
    if children:
        return "<%s%s>%s</%s>" % (spelled, attr_text, _ws(rng) + _ws(rng).join(children) + _ws(rng), spelled)
    if rng.random() < 0.5:
        return "<%s%s/>" % (spelled, attr_text)
    return "<%s%s></%s>" % (spelled, attr_text, spelled)


def random_document_text(rng: random.Random) -> str:
    """Grammar-valid document text with randomized surface form."""
    if rng.random() < 0.5:
        ont = random_ontology(rng, max_types=6, max_axioms=6)
        items = []
        for decl in ont.types.values():
            attrs = [("name", decl.name)]
            if decl.is_relation:
                attrs += [("source.Type", decl.source_type), ("target.Type", decl.target_type)]
            items.append(_elem(rng, decl.kind.value, attrs))
        for ax in ont.axioms:
            attrs = [("specific", ax.specific)]
            if ax.generic:
                attrs.append(("generic", ax.generic))
            items.append(_elem(rng, "subtype", attrs))
        for pair in sorted(tuple(sorted(p)) for p in ont.disjointness):
            names = pair if len(pair) == 2 else (pair[0], pair[0])
            items.append("<!-- OML-EXT disjoint: %s %s -->" % names)
        if rng.random() < 0.3:
            items.append("<!-- an ordinary comment, dropped on parse -->")
        rng.shuffle(items)
        body = _elem(rng, "Ontology", [], items or None)
    else:
        ont = random_ontology(rng, max_types=6, max_axioms=4, allow_disjoint=False)
        coll = random_collection(rng, ont, max_instances=12)
        objs = []
        for obj in coll.objects:
            inner = []
            for name in obj.classifications:
                inner.append(_elem(rng, "classification", [("type", name)]))
            for rel in obj.relation_instances:
                kids = [_elem(rng, "classification", [("type", n)]) for n in rel.classifications]
                inner.append(_elem(rng, "Instance.BinaryRelation", [("target.Instance", rel.target)], kids or None))
            for fn in obj.function_instances:
                kids = [_elem(rng, "classification", [("type", fn.function_type)])]
                inner.append(_elem(rng, "Instance.Function", [("target.Instance", fn.target)], kids))
            attrs = [("id", obj.id)] if obj.id else []
            if rng.random() < 0.2:
                attrs.append(("about", "urn:x%d&amp;y" % rng.randint(0, 9)))
            objs.append(_elem(rng, "Instance.Object", attrs, inner or None))
        attrs = []
        if rng.random() < 0.5:
            attrs.append(("id", "c1"))
        body = _elem(rng, "Collection", attrs, objs or None)
    prefix = "OML:" if rng.random() < 0.1 else ""
    return "<%sOML>%s%s%s</%sOML>%s" % (prefix, _ws(rng), body, _ws(rng), prefix, _ws(rng))
