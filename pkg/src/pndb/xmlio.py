"""XML export and transactional import of parameter collections.

Document shape (normative, byte-deterministic):

    <primary-numbers version="1">
      <collection class="C" instance="i" scope="/S" dict-version="1" object-version="1">
        <param name="Rmax" type="float" unit="?" comment="Outer Radius">1400.0</param>
      </collection>
    </primary-numbers>

Collections are ordered by (scope, class, instance) and carry the latest
object revision only. Attribute order is fixed, indentation is two spaces,
newlines are "\\n", floats use the canonical shortest round-trip form.

Import is transactional: everything is validated against a staged view of
the store first, and nothing is committed unless the whole document is
acceptable. When a document names dict-version or object-version above what
the target store holds, import pads the history with identical revisions so
that a round trip through an empty store reproduces the document exactly.

XML 1.0 cannot carry control characters below U+0020 (except tab, newline,
carriage return). Export emits numeric references for them deterministically,
but such a document will be rejected on re-import by any conforming parser;
string payloads needing those bytes belong in blobs.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

from pndb.errors import (
    MalformedPath,
    PndbError,
    ValidationFailed,
    XmlParseError,
)
from pndb.model import (
    FieldSpec,
    ParameterValue,
    PrimitiveType,
    ScopePath,
    parse_primitive,
    render_primitive,
)
from pndb.store import Store

ROOT_TAG = "primary-numbers"
FORMAT_VERSION = "1"


@dataclass
class ImportReport:
    """Outcome of one import. Errors non-empty means nothing was committed."""

    collections: int = 0
    dictionaries: int = 0
    warnings: list[str] = field(default_factory=list)
    errors: list[str] = field(default_factory=list)


def _escape(text: str, attribute: bool) -> str:
    out = []
    for ch in text:
        if ch == "&":
            out.append("&amp;")
        elif ch == "<":
            out.append("&lt;")
        elif ch == ">":
            out.append("&gt;")
        elif attribute and ch == '"':
            out.append("&quot;")
        elif ch == "\r" or (attribute and ch in "\n\t") or ord(ch) < 0x20 and ch not in "\t\n":
            out.append(f"&#{ord(ch)};")
        else:
            out.append(ch)
    return "".join(out)


def export_xml(store: Store, scope: ScopePath | None = None) -> str:
    """Deterministic document with every matching collection's latest
    revision; *scope* restricts to that subtree when given."""
    with store.lock:
        rows = []
        for class_name, instance_name in store.list_instances():
            obj = store.get_object(class_name, instance_name)
            if scope is not None and not scope.is_ancestor_or_self(obj.scope):
                continue
            rows.append((obj.scope.text, class_name, instance_name, obj))
        rows.sort(key=lambda r: (r[0], r[1], r[2]))

        if not rows:
            return f'<{ROOT_TAG} version="{FORMAT_VERSION}"/>\n'
        lines = [f'<{ROOT_TAG} version="{FORMAT_VERSION}">']
        for scope_text, class_name, instance_name, obj in rows:
            dictionary = store.get_dictionary(class_name, obj.dict_version)
            lines.append(
                f'  <collection class="{_escape(class_name, True)}"'
                f' instance="{_escape(instance_name, True)}"'
                f' scope="{_escape(scope_text, True)}"'
                f' dict-version="{obj.dict_version}"'
                f' object-version="{obj.object_version}">')
            for spec, value in zip(dictionary.fields, obj.values):
                attrs = [f'name="{_escape(spec.name, True)}"',
                         f'type="{spec.type.tag}"']
                if spec.unit is not None:
                    attrs.append(f'unit="{_escape(spec.unit, True)}"')
                if spec.comment:
                    attrs.append(f'comment="{_escape(spec.comment, True)}"')
                text = render_primitive(value)
                if text:
                    lines.append(f'    <param {" ".join(attrs)}>'
                                 f'{_escape(text, False)}</param>')
                else:
                    lines.append(f'    <param {" ".join(attrs)}/>')
            lines.append('  </collection>')
        lines.append(f'</{ROOT_TAG}>')
        return "\n".join(lines) + "\n"


@dataclass
class _StagedCollection:
    class_name: str
    instance_name: str
    scope: ScopePath
    fields: list[FieldSpec]
    values: list[ParameterValue]
    dict_version: int | None = None
    object_version: int | None = None


def import_xml(store: Store, document: str) -> ImportReport:
    """Parse, validate, then commit the collections of *document*.

    Raises on the first problem (malformed markup, duplicate parameter
    names, type errors, incompatible dictionary evolution) with the full
    issue list attached to the exception's report; the store is untouched
    in that case.
    """
    store.check_writable()
    try:
        root = ET.fromstring(document)
    except ET.ParseError as exc:
        raise XmlParseError(f"malformed document: {exc}") from None
    if root.tag != ROOT_TAG:
        raise XmlParseError(f"root element must be <{ROOT_TAG}>, got <{root.tag}>")

    staged: list[_StagedCollection] = []
    report = ImportReport()
    for elem in root:
        if elem.tag != "collection":
            raise XmlParseError(f"unexpected element <{elem.tag}> under root")
        staged.append(_stage_collection(elem, report))
    return _commit_staged(store, staged, report)


def _require(elem: ET.Element, attr: str) -> str:
    value = elem.get(attr)
    if value is None:
        raise XmlParseError(f"<{elem.tag}> missing required attribute {attr!r}")
    return value


def _stage_collection(elem: ET.Element, report: ImportReport) -> _StagedCollection:
    class_name = _require(elem, "class")
    instance_name = _require(elem, "instance")
    try:
        scope = ScopePath.parse(_require(elem, "scope"))
    except MalformedPath as exc:
        raise XmlParseError(str(exc)) from None

    dict_version = elem.get("dict-version")
    object_version = elem.get("object-version")
    specs: list[FieldSpec] = []
    values: list[ParameterValue] = []
    seen: set[str] = set()
    for child in elem:
        if child.tag != "param":
            raise XmlParseError(f"unexpected element <{child.tag}> in collection "
                                f"{class_name}/{instance_name}")
        name = _require(child, "name")
        if name in seen:
            raise ValidationFailed(
                f"duplicate param name {name!r} in {class_name}/{instance_name}")
        seen.add(name)
        type_tag = _require(child, "type")
        try:
            ptype = PrimitiveType.from_tag(type_tag)
            value = parse_primitive(type_tag, child.text or "")
            specs.append(FieldSpec(name=name, type=ptype,
                                   comment=child.get("comment", ""),
                                   unit=child.get("unit")))
        except PndbError as exc:
            raise type(exc)(f"{class_name}/{instance_name}.{name}: {exc}") from None
        except ValueError as exc:
            raise XmlParseError(f"{class_name}/{instance_name}: {exc}") from None
        values.append(value)
    return _StagedCollection(
        class_name, instance_name, scope, specs, values,
        dict_version=int(dict_version) if dict_version else None,
        object_version=int(object_version) if object_version else None)


def _commit_staged(store: Store, staged: list[_StagedCollection],
                   report: ImportReport) -> ImportReport:
    """Dry-run the dictionary evolution for every staged collection against
    a shadow catalog, then commit. Holding the store lock across both passes
    keeps the import atomic with respect to concurrent writers."""
    from pndb import evolution
    from pndb.model import make_dictionary
    from pndb.store import _fields_payload

    with store.lock:
        shadow: dict[str, list] = {
            name: [store.get_dictionary(name, v)
                   for v in store.dictionary_versions(name)]
            for name in store.list_classes()}
        for col in staged:
            versions = shadow.setdefault(col.class_name, [])
            try:
                candidate = make_dictionary(col.class_name, len(versions) + 1,
                                            col.fields)
            except ValueError as exc:
                raise ValidationFailed(f"{col.class_name}: {exc}") from None
            if not versions or _fields_payload(versions[-1].fields) != \
                    _fields_payload(candidate.fields):
                if versions:
                    evolution.diff_dictionaries(versions[-1], candidate)
                versions.append(candidate)
            target_dict = col.dict_version or 0
            while len(versions) < target_dict:
                versions.append(make_dictionary(col.class_name,
                                                len(versions) + 1, col.fields))
            latest = versions[-1]
            instance = _staged_instance(col, latest)
            bad = _validate_against(instance, latest)
            if bad:
                raise ValidationFailed(
                    f"{col.class_name}/{col.instance_name}: {bad}")

        for col in staged:
            before = _current_dict_version(store, col.class_name)
            store.register_class(col.class_name, col.fields)
            target_dict = col.dict_version or 0
            while _current_dict_version(store, col.class_name) < target_dict:
                store.register_class(col.class_name, col.fields,
                                     force_new_version=True)
            after = _current_dict_version(store, col.class_name)
            if after > max(before, 1):
                report.warnings.append(
                    f"class {col.class_name} evolved to dictionary v{after}")
            report.dictionaries += after - before

            puts = 1
            if col.object_version:
                current = _current_object_version(store, col.class_name,
                                                  col.instance_name)
                puts = max(1, col.object_version - current)
            for _ in range(puts):
                store.put_object(col.class_name, col.instance_name, col.scope,
                                 col.values)
            if puts > 1:
                report.warnings.append(
                    f"{col.class_name}/{col.instance_name} padded to object "
                    f"v{col.object_version}")
            report.collections += 1
    return report


def _staged_instance(col: _StagedCollection, dictionary):
    from pndb.model import CollectionInstance
    return CollectionInstance(
        class_name=col.class_name, instance_name=col.instance_name,
        scope=col.scope, dict_version=dictionary.dict_version,
        object_version=1, values=tuple(col.values))


def _validate_against(instance, dictionary) -> str:
    from pndb.model import validate_collection
    report = validate_collection(instance, dictionary)
    return report.summary() if not report.ok else ""


def _current_dict_version(store: Store, class_name: str) -> int:
    try:
        return store.get_dictionary(class_name).dict_version
    except PndbError:
        return 0


def _current_object_version(store: Store, class_name: str,
                            instance_name: str) -> int:
    try:
        return store.get_object(class_name, instance_name).object_version
    except PndbError:
        return 0
