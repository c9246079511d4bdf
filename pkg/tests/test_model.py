import random

import pytest

from genkb import random_kb
from omlcore.errors import (
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
from omlcore.model import (
    Collection,
    KnowledgeBase,
    Literal,
    Ontology,
    TypeKind,
    kb_equal,
    resolve_instance_name,
    resolve_target,
)


def test_declare_object_type_usable_as_source():
    ont = Ontology()
    movie = ont.declare_type(TypeKind.OBJECT, "Movie")
    year = ont.declare_type(TypeKind.FUNCTION, "year", source=movie, target="Natno")
    assert year.source_type == "Movie"
    assert ont.resolve_type("Movie") is movie


def test_duplicate_type_name_rejected():
    ont = Ontology()
    ont.declare_type(TypeKind.OBJECT, "Movie")
    with pytest.raises(DuplicateTypeName):
        ont.declare_type(TypeKind.DATA, "Movie")


def test_strict_mode_rejects_unresolved_reference():
    ont = Ontology(strict=True)
    ont.declare_type(TypeKind.OBJECT, "Movie")
    with pytest.raises(UnresolvedTypeRef):
        ont.declare_type(TypeKind.BINARY_RELATION, "genre", source="Movie", target="Genre")


def test_lenient_mode_defers_unresolved_reference():
    ont = Ontology()
    genre = ont.declare_type(TypeKind.BINARY_RELATION, "genre", source="Movie", target="Genre")
    assert genre.target_type == "Genre"
    assert ont.try_resolve_type("Genre") is None


def test_builtin_natno_resolves_without_declaration():
    ont = Ontology()
    ont.declare_type(TypeKind.OBJECT, "Movie")
    year = ont.declare_type(TypeKind.FUNCTION, "year", source="Movie", target="Natno")
    assert ont.resolve_type(year.target_type).builtin


def test_entity_type_cannot_carry_signature():
    ont = Ontology()
    with pytest.raises(KindMismatch):
        ont.declare_type(TypeKind.OBJECT, "Movie", source="Cast", target="Cast")


def test_subtype_recorded_for_entities_and_relations():
    ont = Ontology()
    ont.declare_type(TypeKind.OBJECT, "Agent")
    ont.declare_type(TypeKind.OBJECT, "Person")
    ont.declare_type(TypeKind.BINARY_RELATION, "creatorship", source="Agent", target="Agent")
    ont.declare_type(TypeKind.BINARY_RELATION, "authorship", source="Person", target="Person")
    ont.declare_subtype("Person", "Agent")
    ont.declare_subtype("authorship", "creatorship")
    assert [(a.specific, a.generic) for a in ont.axioms] == [
        ("Person", "Agent"),
        ("authorship", "creatorship"),
    ]


def test_subtype_across_dimensions_rejected():
    ont = Ontology()
    ont.declare_type(TypeKind.OBJECT, "Person")
    ont.declare_type(TypeKind.BINARY_RELATION, "authorship", source="Person", target="Person")
    with pytest.raises(KindMismatch):
        ont.declare_subtype("Person", "authorship")
    with pytest.raises(KindMismatch):
        ont.declare_disjoint("Person", "authorship")


def test_missing_generic_recorded_as_bare_axiom():
    ont = Ontology()
    ont.declare_type(TypeKind.OBJECT, "Person")
    ont.declare_subtype("Person")
    assert ont.axioms[0].generic is None


def test_disjoint_pair_is_unordered():
    ont = Ontology()
    ont.declare_type(TypeKind.OBJECT, "Person")
    ont.declare_type(TypeKind.OBJECT, "Organization")
    ont.declare_disjoint("Person", "Organization")
    ont.declare_disjoint("Organization", "Person")
    assert ont.disjointness == {frozenset({"Person", "Organization"})}


def test_prefixed_resolution_through_extends():
    base = Ontology()
    creator = base.declare_type(TypeKind.BINARY_RELATION, "creator", source="Entity", target="Entity")
    ont = Ontology(extends=[("urn:base", "dc")])
    ont.bound["urn:base"] = base
    assert ont.resolve_type("dc:creator") is creator
    with pytest.raises(UnknownPrefix):
        ont.resolve_type("xx:Thing")
    assert ont.name_for(creator) == "dc:creator"


def test_unprefixed_resolution_searches_imports_and_detects_ambiguity():
    a, b = Ontology(), Ontology()
    a.declare_type(TypeKind.OBJECT, "Thing2")
    b.declare_type(TypeKind.OBJECT, "Thing2")
    ont = Ontology(extends=[("urn:a", "a"), ("urn:b", "b")])
    ont.bound.update({"urn:a": a, "urn:b": b})
    with pytest.raises(AmbiguousName):
        ont.resolve_type("Thing2")
    assert ont.resolve_type("a:Thing2") is a.types["Thing2"]


def test_malformed_nsname_cites_rule_26():
    ont = Ontology()
    with pytest.raises(GrammarError) as err:
        ont.resolve_type("a:b:c")
    assert err.value.rule == 26


def test_resolution_is_deterministic():
    rng = random.Random(7)
    for _ in range(25):
        kb = random_kb(rng)
        for name in kb.ontology.types:
            assert kb.ontology.resolve_type(name) is kb.ontology.resolve_type(name)


def test_instance_name_resolution_bare_and_qualified(movie_kb):
    obj = resolve_instance_name(movie_kb, "Casablanca_1942")
    assert obj.id == "Casablanca_1942"
    assert resolve_instance_name(movie_kb, "Movie#Casablanca_1942") is obj
    with pytest.raises(UnresolvedInstanceRef):
        resolve_instance_name(movie_kb, "Movie#Nonexistent")


def test_duplicate_instance_id_rejected():
    coll = Collection()
    coll.add_object("x")
    with pytest.raises(DuplicateInstanceId):
        coll.add_object("x")


def test_function_single_valuedness():
    ont = Ontology()
    ont.declare_type(TypeKind.OBJECT, "Movie")
    ont.declare_type(TypeKind.FUNCTION, "year", source="Movie", target="Natno")
    coll = Collection()
    obj = coll.add_object("m")
    coll.add_function_instance(obj, "year", "1942")
    with pytest.raises(DuplicateFunctionValue):
        coll.add_function_instance(obj, "year", "1943")


def test_classify_is_idempotent():
    coll = Collection()
    obj = coll.add_object("m")
    rel = coll.add_relation_instance(obj, "Drama", ["genre"])
    rel.classify("genre")
    obj.classify("Movie")
    obj.classify("Movie")
    assert rel.classifications == ["genre"]
    assert obj.classifications == ["Movie"]


def test_target_resolution_prefers_instances_then_datatype_literals(movie_kb):
    coll = movie_kb.collection
    cast = coll.find("cast1")
    by_type = {f.function_type: f for f in cast.function_instances}
    assert resolve_target(movie_kb, coll, by_type["movie"]) is coll.find("Casablanca_1942")
    assert resolve_target(movie_kb, coll, by_type["character"]) == Literal("String", "Rich Blaine")
    movie = coll.find("Casablanca_1942")
    year = movie.function_instances[0]
    assert resolve_target(movie_kb, coll, year) == Literal("Natno", "1942")
    genre_rel = movie.relation_instances[0]
    assert resolve_target(movie_kb, coll, genre_rel) == "Drama"  # dangling name


def test_natno_literal_lexical_check():
    with pytest.raises(ValueError):
        Literal("Natno", "12a")
    assert Literal("Natno", "0").lexical == "0"


def test_kb_equal_detects_fact_changes(movie_kb):
    from conftest import golden_text
    from omlcore import xmlio

    rng = random.Random(3)
    other = random_kb(rng)
    assert kb_equal(movie_kb, movie_kb)
    assert not kb_equal(movie_kb, other)
    clone = KnowledgeBase(
        xmlio.parse_oml(golden_text("movie.oml")).root,
        [xmlio.parse_oml(golden_text("casablanca-generic.oml")).root],
    )
    assert kb_equal(movie_kb, clone)
    clone.collections[0].objects[0].classify("Extra")
    assert not kb_equal(movie_kb, clone)
