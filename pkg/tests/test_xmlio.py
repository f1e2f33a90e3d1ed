from __future__ import annotations

import random

import pytest

from pndb.errors import (
    MalformedLiteral,
    UnknownType,
    ValidationFailed,
    XmlParseError,
)
from pndb.model import FieldSpec, ParameterValue, PrimitiveType, ScopePath
from pndb.store import Store
from pndb.xmlio import export_xml, import_xml

from conftest import mother_volume_fields, mother_volume_values


def _put(store, class_name, instance, scope, fields, values):
    store.register_class(class_name, fields)
    store.put_object(class_name, instance, ScopePath.parse(scope), values)


# --- export shape ---


def test_empty_store_exports_empty_root(store):
    assert export_xml(store) == '<primary-numbers version="1"/>\n'


def test_export_shape_and_attribute_order(mother_volume):
    doc = export_xml(mother_volume)
    assert doc == (
        '<primary-numbers version="1">\n'
        '  <collection class="ATLASMotherVolume" instance="default"'
        ' scope="/ATLAS" dict-version="1" object-version="1">\n'
        '    <param name="Version" type="int"'
        ' comment="2001 VERSION WITH ENDCAP SHIFTED B">2</param>\n'
        '    <param name="Rmin" type="float" comment="Inner Radius">0.0</param>\n'
        '    <param name="Rmax" type="float" comment="Outer Radius">1400.0</param>\n'
        '    <param name="Zmax" type="float" comment="Maximum Z">2350.0</param>\n'
        '  </collection>\n'
        '</primary-numbers>\n')


def test_export_orders_by_scope_class_instance(store):
    f = [FieldSpec("a", PrimitiveType.INT)]
    v = [ParameterValue(PrimitiveType.INT, 1)]
    _put(store, "Zeta", "z", "/A", f, v)
    _put(store, "Alpha", "b", "/B", f, v)
    store.put_object("Alpha", "a", ScopePath.parse("/B"), v)
    store.put_object("Zeta", "a", ScopePath.parse("/A"), v)
    doc = export_xml(store)
    order = [line.split('class="')[1].split('"')[0] + "/"
             + line.split('instance="')[1].split('"')[0]
             for line in doc.splitlines() if "<collection" in line]
    assert order == ["Zeta/a", "Zeta/z", "Alpha/a", "Alpha/b"]


def test_export_latest_version_only(store):
    f = [FieldSpec("a", PrimitiveType.INT)]
    _put(store, "C", "x", "/", f, [ParameterValue(PrimitiveType.INT, 1)])
    store.put_object("C", "x", ScopePath.parse("/"),
                     [ParameterValue(PrimitiveType.INT, 2)])
    doc = export_xml(store)
    assert doc.count("<collection") == 1
    assert 'object-version="2"' in doc
    assert ">2</param>" in doc


def test_export_scope_filter(store):
    f = [FieldSpec("a", PrimitiveType.INT)]
    v = [ParameterValue(PrimitiveType.INT, 1)]
    _put(store, "C", "inner", "/ATLAS/Inner", f, v)
    store.put_object("C", "muon", ScopePath.parse("/ATLAS/Muon"), v)
    doc = export_xml(store, ScopePath.parse("/ATLAS/Inner"))
    assert 'instance="inner"' in doc
    assert 'instance="muon"' not in doc
    # the subtree root itself matches
    assert export_xml(store, ScopePath.parse("/ATLAS")).count("<collection") == 2


def test_export_escapes_markup(store):
    fields = [FieldSpec("s", PrimitiveType.STRING, comment='quote " and <tag> & amp')]
    _put(store, "C", "x", "/", fields,
         [ParameterValue(PrimitiveType.STRING, 'a<b>&"c"')])
    doc = export_xml(store)
    assert 'comment="quote &quot; and &lt;tag&gt; &amp; amp"' in doc
    assert '>a&lt;b&gt;&amp;"c"</param>' in doc
    # attribute newlines/tabs become character references
    fields2 = [FieldSpec("t", PrimitiveType.STRING, comment="line\nbreak\ttab")]
    _put(store, "D", "y", "/", fields2, [ParameterValue(PrimitiveType.STRING, "")])
    doc2 = export_xml(store)
    assert 'comment="line&#10;break&#9;tab"' in doc2


def test_export_empty_value_self_closes(store):
    _put(store, "C", "x", "/", [FieldSpec("s", PrimitiveType.STRING)],
         [ParameterValue(PrimitiveType.STRING, "")])
    assert '<param name="s" type="string"/>' in export_xml(store)


def test_export_unit_attribute_only_when_present(store):
    fields = [FieldSpec("a", PrimitiveType.FLOAT, unit="mm"),
              FieldSpec("b", PrimitiveType.FLOAT)]
    _put(store, "C", "x", "/", fields,
         [ParameterValue(PrimitiveType.FLOAT, 1.0),
          ParameterValue(PrimitiveType.FLOAT, 2.0)])
    doc = export_xml(store)
    assert '<param name="a" type="float" unit="mm">1.0</param>' in doc
    assert '<param name="b" type="float">2.0</param>' in doc


# --- import ---


def test_import_into_empty_store(store):
    doc = ('<primary-numbers version="1">\n'
           '  <collection class="C" instance="x" scope="/A">\n'
           '    <param name="a" type="int">5</param>\n'
           '    <param name="b" type="string[]">["p","q"]</param>\n'
           '  </collection>\n'
           '</primary-numbers>\n')
    report = import_xml(store, doc)
    assert report.collections == 1
    obj = store.get_object("C", "x")
    assert obj.scope.text == "/A"
    assert obj.values[0].payload == 5
    assert obj.values[1].payload == ("p", "q")


def test_import_export_round_trip_byte_identical(mother_volume, tmp_path):
    doc = export_xml(mother_volume)
    with Store.create(tmp_path / "other") as other:
        import_xml(other, doc)
        assert export_xml(other) == doc


def test_import_honors_declared_versions(store, tmp_path):
    doc = ('<primary-numbers version="1">\n'
           '  <collection class="C" instance="x" scope="/"'
           ' dict-version="3" object-version="2">\n'
           '    <param name="a" type="int">5</param>\n'
           '  </collection>\n'
           '</primary-numbers>\n')
    report = import_xml(store, doc)
    assert store.get_dictionary("C").dict_version == 3
    assert store.get_object("C", "x").object_version == 2
    assert report.warnings
    # re-export reproduces the declared versions
    doc2 = export_xml(store)
    assert 'dict-version="3" object-version="2"' in doc2


def test_import_evolves_existing_class(store):
    _put(store, "C", "x", "/", [FieldSpec("a", PrimitiveType.INT)],
         [ParameterValue(PrimitiveType.INT, 1)])
    doc = ('<primary-numbers version="1">\n'
           '  <collection class="C" instance="x" scope="/">\n'
           '    <param name="a" type="float">1.5</param>\n'
           '    <param name="b" type="bool">true</param>\n'
           '  </collection>\n'
           '</primary-numbers>\n')
    report = import_xml(store, doc)
    assert store.get_dictionary("C").dict_version == 2
    assert any("evolved" in w for w in report.warnings)
    obj = store.get_object("C", "x")
    assert obj.dict_version == 2
    assert obj.values[0].payload == 1.5
    assert obj.values[1].payload is True


def test_import_transactional_on_late_error(store):
    seq_before = store.seq
    doc = ('<primary-numbers version="1">\n'
           '  <collection class="Good" instance="x" scope="/">\n'
           '    <param name="a" type="int">1</param>\n'
           '  </collection>\n'
           '  <collection class="Bad" instance="x" scope="/">\n'
           '    <param name="a" type="int">not-a-number</param>\n'
           '  </collection>\n'
           '</primary-numbers>\n')
    with pytest.raises(MalformedLiteral):
        import_xml(store, doc)
    assert store.seq == seq_before
    assert store.list_classes() == []


def test_import_transactional_on_incompatible_evolution(store):
    _put(store, "C", "x", "/", [FieldSpec("a", PrimitiveType.STRING)],
         [ParameterValue(PrimitiveType.STRING, "s")])
    seq_before = store.seq
    doc = ('<primary-numbers version="1">\n'
           '  <collection class="New" instance="n" scope="/">\n'
           '    <param name="ok" type="int">1</param>\n'
           '  </collection>\n'
           '  <collection class="C" instance="x" scope="/">\n'
           '    <param name="a" type="int">3</param>\n'
           '  </collection>\n'
           '</primary-numbers>\n')
    from pndb.errors import IncompatibleEvolution
    with pytest.raises(IncompatibleEvolution):
        import_xml(store, doc)
    assert store.seq == seq_before
    assert store.list_classes() == ["C"]


@pytest.mark.parametrize("doc,error", [
    ("<not-xml", XmlParseError),
    ("<wrong-root/>", XmlParseError),
    ('<primary-numbers version="1"><bogus/></primary-numbers>', XmlParseError),
    ('<primary-numbers version="1">'
     '<collection instance="x" scope="/"/></primary-numbers>', XmlParseError),
    ('<primary-numbers version="1">'
     '<collection class="C" instance="x" scope="/">'
     '<param name="a" type="nope">1</param></collection></primary-numbers>',
     UnknownType),
    ('<primary-numbers version="1">'
     '<collection class="C" instance="x" scope="bad">'
     '<param name="a" type="int">1</param></collection></primary-numbers>',
     XmlParseError),
    ('<primary-numbers version="1">'
     '<collection class="C" instance="x" scope="/">'
     '<param name="a" type="int">1</param>'
     '<param name="a" type="int">2</param></collection></primary-numbers>',
     ValidationFailed),
])
def test_import_rejects_bad_documents(store, doc, error):
    with pytest.raises(error):
        import_xml(store, doc)
    assert store.seq == 0


def test_import_read_only_store_rejected(tmp_path):
    from pndb.errors import ReadOnlyStore
    from pndb.store import StoreMode
    Store.create(tmp_path / "s").close()
    with Store.open(tmp_path / "s", StoreMode.READ_ONLY) as store:
        with pytest.raises(ReadOnlyStore):
            import_xml(store, '<primary-numbers version="1"/>')


# --- randomized round trip ---

_TAGS = ["int", "float", "bool", "string", "int[]", "float[]", "string[]"]


def _random_fixture(rng, n_classes):
    """Class definitions with values whose text forms are XML-safe."""
    out = []
    for c in range(n_classes):
        fields = []
        values = []
        for i in range(rng.randrange(1, 6)):
            tag = rng.choice(_TAGS)
            fields.append(FieldSpec(
                f"p{i}", PrimitiveType.from_tag(tag),
                comment=rng.choice(["", "a comment", 'with "quotes" & <mark>']),
                unit=rng.choice([None, "mm", "MeV"])))
            values.append(_random_value(rng, tag))
        scope = rng.choice(["/", "/A", "/A/B", "/C"])
        out.append((f"Class{c}", rng.choice(["default", "alt"]), scope,
                    fields, values))
    return out


def _random_value(rng, tag):
    base = {
        "int": lambda: rng.randrange(-10**6, 10**6),
        "float": lambda: rng.choice([0.0, -1.5, 2e-3, 1e18, 3.14159]),
        "bool": lambda: rng.random() < 0.5,
        "string": lambda: rng.choice(["", "text", 'q"uote', "a<b>&c", "x,y"]),
    }
    if tag.endswith("[]"):
        inner = tag[:-2]
        return ParameterValue(
            PrimitiveType.from_tag(tag),
            tuple(base[inner]() for _ in range(rng.randrange(0, 4))))
    return ParameterValue(PrimitiveType.from_tag(tag), base[tag]())


def test_randomized_export_import_export_stable(tmp_path):
    rng = random.Random(11)
    for case in range(10):
        with Store.create(tmp_path / f"a{case}") as store:
            for name, instance, scope, fields, values in _random_fixture(rng, 8):
                _put(store, name, instance, scope, fields, values)
            doc = export_xml(store)
        with Store.create(tmp_path / f"b{case}") as other:
            import_xml(other, doc)
            assert export_xml(other) == doc
