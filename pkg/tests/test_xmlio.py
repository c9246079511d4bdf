import random

import pytest

from conftest import golden_text
from genkb import random_document_text
from omlcore import xmlio
from omlcore.errors import (
    DuplicateTypeName,
    GrammarError,
    ImportCycle,
    ParseError,
    UnresolvableImport,
)
from omlcore.model import Collection, Ontology, TypeKind, collection_equal, ontology_equal
from omlcore.xmlparse import parse_document, parse_fragment


class TestXmlSubset:
    def test_positions_and_nesting(self):
        root = parse_document('<a x="1">\n  <b/>\n</a>', "t.xml")
        assert (root.line, root.col) == (1, 1)
        b = root.child_elements()[0]
        assert (b.line, b.col) == (2, 3)

    def test_entities_decoded_and_unknown_rejected(self):
        root = parse_document('<a x="&lt;&amp;&quot;&apos;&gt;">x&lt;y</a>')
        assert root.attrs["x"] == "<&\"'>"
        assert root.text() == "x<y"
        with pytest.raises(ParseError):
            parse_document("<a>&nbsp;</a>")
        with pytest.raises(ParseError):
            parse_document("<a>&#65;</a>")

    def test_unsupported_constructs_rejected(self):
        for text in (
            "<?xml version='1.0'?><a/>",
            "<!DOCTYPE a><a/>",
            "<a><![CDATA[x]]></a>",
        ):
            with pytest.raises(ParseError):
                parse_document(text)

    def test_mismatched_and_duplicate_errors_carry_position(self):
        with pytest.raises(ParseError) as err:
            parse_document("<a>\n</b>")
        assert err.value.location == ("<xml>", 2, 1)
        with pytest.raises(ParseError):
            parse_document('<a x="1" x="2"/>')

    def test_fragment_allows_many_roots(self):
        nodes = parse_fragment("<!-- note --><a/><b/>")
        assert [n.name for n in nodes if hasattr(n, "name")][-2:] == ["a", "b"]


def test_movie_ontology_parses_to_expected_shape(movie_ontology):
    kinds = [d.kind for d in movie_ontology.types.values()]
    assert kinds.count(TypeKind.OBJECT) == 2
    assert kinds.count(TypeKind.FUNCTION) == 4
    assert kinds.count(TypeKind.BINARY_RELATION) == 1


def test_generic_collection_parses_to_expected_shape(casablanca_collection):
    coll = casablanca_collection
    assert len(coll.objects) == 2
    assert sum(len(o.relation_instances) for o in coll.objects) == 2
    assert sum(len(o.function_instances) for o in coll.objects) == 4


def test_paper_style_fragments_parse_when_bracketed():
    # type blocks and collections are often quoted bare; wrapping them in
    # the document bracket must be enough
    snippet = """
    <Type.Entity name="Movie"/>
    <Type.Function name="year" source.Type="Movie" target.Type="Natno"/>
    <Type.BinaryRelation name="genre" source.Type="Movie" target.Type="Genre"/>
    """
    doc = xmlio.parse_oml("<OML><Ontology>%s</Ontology></OML>" % snippet)
    assert set(doc.root.types) == {"Movie", "year", "genre"}


def test_empty_oml_is_rule_1_violation():
    with pytest.raises(GrammarError) as err:
        xmlio.parse_oml("<OML></OML>")
    assert err.value.rule == 1


@pytest.mark.parametrize(
    "text, rule",
    [
        ("<OML><Ontology/><Ontology/></OML>", 1),
        ("<Ontology/>", 1),
        ("<OML><Ontology><bogus/></Ontology></OML>", 2),
        ('<OML><Ontology><Type.BinaryRelation name="r" target.Type="T"/></Ontology></OML>', 6),
        ('<OML><Ontology><Type.Object name="T" extra="1"/></Ontology></OML>', 5),
        ("<OML><Ontology><subtype/></Ontology></OML>", 8),
        ('<OML><Collection><classification type="T"/></Collection></OML>', 10),
        ('<OML><Collection><Instance.Object id="a"><bogus/></Instance.Object></Collection></OML>', 11),
        ('<OML><Collection><Instance.Object id="a"><Instance.BinaryRelation/></Instance.Object></Collection></OML>', 12),
        ('<OML><Collection><Instance.Object id="1x"/></Collection></OML>', 24),
        ('<OML><Ontology><subtype specific="a:b:c"/></Ontology></OML>', 26),
    ],
)
def test_grammar_errors_cite_rule_numbers(text, rule):
    with pytest.raises(GrammarError) as err:
        xmlio.parse_oml(text)
    assert err.value.rule == rule
    assert 1 <= err.value.rule <= 30


def test_duplicate_type_name_raises_at_parse():
    with pytest.raises(DuplicateTypeName):
        xmlio.parse_oml('<OML><Ontology><Type.Object name="T"/><Type.Entity name="T"/></Ontology></OML>')


def test_tag_synonyms_normalize_and_reserialize_canonically():
    text = '<OML:OML><OML:Ontology><Type.Entity name="T"/></OML:Ontology></OML:OML>'
    doc = xmlio.parse_oml(text)
    out = xmlio.serialize_generic(doc)
    assert "<Type.Object" in out and "OML:" not in out
    assert ontology_equal(doc.root, xmlio.parse_oml(out).root)


def test_escaping_round_trip():
    coll = Collection()
    obj = coll.add_object("m")
    coll.add_function_instance(obj, "character", 'Rich <Blaine> & "co"')
    out = xmlio.serialize_generic(coll)
    assert "&lt;Blaine&gt; &amp; &quot;co&quot;" in out
    again = xmlio.parse_oml(out).root
    assert again.objects[0].function_instances[0].target == 'Rich <Blaine> & "co"'


def test_sidecar_comments_round_trip():
    text = """<OML>
  <Ontology>
    <Type.Object name="Person"/>
    <Type.Object name="Organization"/>
    <!-- OML-EXT disjoint: Person Organization -->
    <!-- OML-EXT incoherent: Person -->
  </Ontology>
</OML>
"""
    ont = xmlio.parse_oml(text).root
    assert ont.disjointness == {frozenset({"Person", "Organization"})}
    assert ont.incoherent == {"Person"}
    out = xmlio.serialize_generic(ont)
    assert "OML-EXT disjoint: Organization Person" in out
    assert ontology_equal(ont, xmlio.parse_oml(out).root)


def test_unknown_sidecar_directive_rejected():
    with pytest.raises(ParseError):
        xmlio.parse_oml("<OML><Ontology><!-- OML-EXT frobnicate: X --></Ontology></OML>")


def test_ordinary_comments_are_dropped():
    doc = xmlio.parse_oml("<OML><!-- hi --><Ontology><!-- there --></Ontology></OML>")
    assert xmlio.serialize_generic(doc) == "<OML>\n  <Ontology/>\n</OML>\n"


def test_comment_attribute_on_types_round_trips():
    text = '<OML><Ontology><Type.Object name="T" comment="a &quot;note&quot;"/></Ontology></OML>'
    ont = xmlio.parse_oml(text).root
    assert ont.types["T"].comment == 'a "note"'
    assert 'comment="a &quot;note&quot;"' in xmlio.serialize_generic(ont)


def test_explicit_source_instance_round_trips():
    text = """<OML>
  <Collection>
    <Instance.Object id="a"/>
    <Instance.Object id="b">
      <Instance.BinaryRelation source.Instance="a" target.Instance="b">
        <classification type="r"/>
      </Instance.BinaryRelation>
    </Instance.Object>
  </Collection>
</OML>
"""
    coll = xmlio.parse_oml(text).root
    rel = coll.objects[1].relation_instances[0]
    assert rel.source == "a"
    out = xmlio.serialize_generic(coll)
    assert 'source.Instance="a"' in out
    assert collection_equal(coll, xmlio.parse_oml(out).root)


def test_unclassified_function_instance_round_trips():
    text = """<OML>
  <Collection>
    <Instance.Object id="a">
      <Instance.Function target.Instance="42"/>
    </Instance.Object>
  </Collection>
</OML>
"""
    coll = xmlio.parse_oml(text).root
    assert coll.objects[0].function_instances[0].function_type is None
    assert collection_equal(coll, xmlio.parse_oml(xmlio.serialize_generic(coll)).root)


def _docs_equal(a, b) -> bool:
    if isinstance(a.root, Ontology) and isinstance(b.root, Ontology):
        return ontology_equal(a.root, b.root)
    if isinstance(a.root, Collection) and isinstance(b.root, Collection):
        return collection_equal(a.root, b.root)
    return False


def test_canonicalization_is_a_projection_on_goldens():
    for name in ("movie.oml", "casablanca-generic.oml"):
        doc = xmlio.parse_oml(golden_text(name), name)
        out = xmlio.serialize_generic(doc)
        again = xmlio.parse_oml(out, name)
        assert _docs_equal(doc, again)
        assert xmlio.serialize_generic(again) == out


def test_canonicalization_is_a_projection_on_random_documents():
    rng = random.Random(2024)
    for _ in range(120):
        text = random_document_text(rng)
        doc = xmlio.parse_oml(text, "gen.oml")
        out = xmlio.serialize_generic(doc)
        again = xmlio.parse_oml(out, "gen.oml")
        assert _docs_equal(doc, again), text
        assert xmlio.serialize_generic(again) == out


class TestLoadExtends:
    BASE = '<OML><Ontology><Type.Object name="Thing"/></Ontology></OML>'

    def test_prefixed_lookup_through_import(self):
        main = '<OML><Ontology><extends ontology="urn:base" prefix="base"/></Ontology></OML>'
        kb = xmlio.load_extends(xmlio.parse_oml(main), {"urn:base": self.BASE})
        assert kb.ontology.resolve_type("base:Thing").name == "Thing"

    def test_missing_import_and_cycle(self):
        main = '<OML><Ontology><extends ontology="urn:a" prefix="a"/></Ontology></OML>'
        with pytest.raises(UnresolvableImport):
            xmlio.load_extends(xmlio.parse_oml(main), {})
        a = '<OML><Ontology><extends ontology="urn:b" prefix="b"/></Ontology></OML>'
        b = '<OML><Ontology><extends ontology="urn:a" prefix="a"/></Ontology></OML>'
        with pytest.raises(ImportCycle):
            xmlio.load_extends(xmlio.parse_oml(a), {"urn:a": a, "urn:b": b})

    def test_collection_binds_its_ontology_attribute(self):
        coll = '<OML><Collection ontology="urn:base"><Instance.Object id="x"/></Collection></OML>'
        kb = xmlio.load_extends(xmlio.parse_oml(coll), {"urn:base": self.BASE})
        assert kb.ontology is not None and "Thing" in kb.ontology.types
        assert kb.collection.objects[0].id == "x"
