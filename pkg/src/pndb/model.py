"""Core value model: primitive types, parameter values, field specs, data
dictionaries, scope paths, and the validation rules shared by every other
layer.

All types here are immutable values and safe to share between threads.

Canonical textual forms (normative for exports and the change log):
  int       decimal, e.g. ``2``
  float     shortest round-trip decimal, e.g. ``1400.0``, ``1e+30``
  bool      ``true`` / ``false``
  string    the text itself
  blob      ``blob:<decimal-id>:<64-hex-digit-sha256>``
  arrays    ``[v1,v2,...]``; string elements are JSON-quoted
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field, replace
from enum import Enum

from pndb.errors import (
    MalformedLiteral,
    MalformedPath,
    NoDefaultForBlob,
    NonFiniteFloat,
    UnknownType,
)

IDENTIFIER_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1
UINT64_MAX = 2**64 - 1

_INT_RE = re.compile(r"[+-]?[0-9]+\Z")
_FLOAT_RE = re.compile(r"[+-]?(?:[0-9]+(?:\.[0-9]*)?|\.[0-9]+)(?:[eE][+-]?[0-9]+)?\Z")
_BLOB_RE = re.compile(r"blob:([0-9]+):([0-9a-f]{64})\Z")

_json_decoder = json.JSONDecoder()


class PrimitiveType(Enum):
    """Closed set of value types; the text tags appear in XML, table rows,
    and dictionary payloads."""

    INT = "int"
    FLOAT = "float"
    BOOL = "bool"
    STRING = "string"
    BLOB = "blob"
    INT_ARRAY = "int[]"
    FLOAT_ARRAY = "float[]"
    STRING_ARRAY = "string[]"

    @classmethod
    def from_tag(cls, tag: str) -> PrimitiveType:
        for member in cls:
            if member.value == tag:
                return member
        raise UnknownType(f"unknown type tag {tag!r}")

    @property
    def tag(self) -> str:
        return self.value

    @property
    def is_array(self) -> bool:
        return self in (PrimitiveType.INT_ARRAY, PrimitiveType.FLOAT_ARRAY,
                        PrimitiveType.STRING_ARRAY)


@dataclass(frozen=True)
class BlobRef:
    """Locator for one stored byte string.

    ``checksum`` is the SHA-256 digest of the content, so (blob_id, checksum)
    fully determines it; ``length`` is bookkeeping filled in by the store and
    absent (None) when the ref was parsed from its textual form. Equality and
    hashing deliberately ignore ``length``.
    """

    blob_id: int
    checksum: bytes
    length: int | None = None

    def __post_init__(self):
        if not (0 <= self.blob_id <= UINT64_MAX):
            raise ValueError(f"blob_id out of range: {self.blob_id}")
        if len(self.checksum) != 32:
            raise ValueError("checksum must be a 32-byte digest")

    def __eq__(self, other) -> bool:
        if not isinstance(other, BlobRef):
            return NotImplemented
        return self.blob_id == other.blob_id and self.checksum == other.checksum

    def __hash__(self) -> int:
        return hash((self.blob_id, self.checksum))

    @property
    def literal(self) -> str:
        return f"blob:{self.blob_id}:{self.checksum.hex()}"


@dataclass(frozen=True)
class ParameterValue:
    """One typed value. ``payload`` is an int, float, bool, str, BlobRef, or a
    homogeneous tuple for array types."""

    type: PrimitiveType
    payload: object

    def __post_init__(self):
        object.__setattr__(self, "payload", _check_payload(self.type, self.payload))

    @property
    def text(self) -> str:
        """Canonical textual rendering."""
        return render_primitive(self)


def _check_int(v: object) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise TypeError(f"int payload expected, got {type(v).__name__}")
    if not (INT64_MIN <= v <= INT64_MAX):
        raise ValueError(f"int payload out of 64-bit range: {v}")
    return v


def _check_float(v: object) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise TypeError(f"float payload expected, got {type(v).__name__}")
    f = float(v)
    if not math.isfinite(f):
        raise NonFiniteFloat(f"non-finite float payload: {f!r}")
    return f


def _check_payload(ptype: PrimitiveType, payload: object) -> object:
    if ptype is PrimitiveType.INT:
        return _check_int(payload)
    if ptype is PrimitiveType.FLOAT:
        return _check_float(payload)
    if ptype is PrimitiveType.BOOL:
        if not isinstance(payload, bool):
            raise TypeError(f"bool payload expected, got {type(payload).__name__}")
        return payload
    if ptype is PrimitiveType.STRING:
        if not isinstance(payload, str):
            raise TypeError(f"str payload expected, got {type(payload).__name__}")
        return payload
    if ptype is PrimitiveType.BLOB:
        if not isinstance(payload, BlobRef):
            raise TypeError(f"BlobRef payload expected, got {type(payload).__name__}")
        return payload
    if ptype is PrimitiveType.INT_ARRAY:
        return tuple(_check_int(v) for v in payload)
    if ptype is PrimitiveType.FLOAT_ARRAY:
        return tuple(_check_float(v) for v in payload)
    if ptype is PrimitiveType.STRING_ARRAY:
        items = tuple(payload)
        for v in items:
            if not isinstance(v, str):
                raise TypeError(f"str array element expected, got {type(v).__name__}")
        return items
    raise UnknownType(str(ptype))


def render_primitive(value: ParameterValue) -> str:
    """Canonical text for *value*; ``parse_primitive`` inverts this exactly."""
    t, p = value.type, value.payload
    if t is PrimitiveType.INT:
        return str(p)
    if t is PrimitiveType.FLOAT:
        return repr(p)
    if t is PrimitiveType.BOOL:
        return "true" if p else "false"
    if t is PrimitiveType.STRING:
        return p
    if t is PrimitiveType.BLOB:
        return p.literal
    if t is PrimitiveType.INT_ARRAY:
        return "[" + ",".join(str(v) for v in p) + "]"
    if t is PrimitiveType.FLOAT_ARRAY:
        return "[" + ",".join(repr(v) for v in p) + "]"
    if t is PrimitiveType.STRING_ARRAY:
        return "[" + ",".join(json.dumps(v, ensure_ascii=False) for v in p) + "]"
    raise UnknownType(str(t))


def parse_primitive(type_tag: str, literal: str) -> ParameterValue:
    """Parse *literal* as a value of the type named by *type_tag*.

    The empty literal is valid only for strings (the string zero value);
    for int/float/bool it is malformed.
    """
    ptype = PrimitiveType.from_tag(type_tag)
    if ptype is PrimitiveType.STRING:
        return ParameterValue(ptype, literal)
    if ptype is PrimitiveType.INT:
        return ParameterValue(ptype, _parse_int(literal))
    if ptype is PrimitiveType.FLOAT:
        return ParameterValue(ptype, _parse_float(literal))
    if ptype is PrimitiveType.BOOL:
        if literal == "true":
            return ParameterValue(ptype, True)
        if literal == "false":
            return ParameterValue(ptype, False)
        raise MalformedLiteral(f"bool literal must be 'true' or 'false', got {literal!r}")
    if ptype is PrimitiveType.BLOB:
        m = _BLOB_RE.match(literal)
        if not m:
            raise MalformedLiteral(f"malformed blob literal {literal!r}")
        blob_id = int(m.group(1))
        if blob_id > UINT64_MAX:
            raise MalformedLiteral(f"blob id out of range in {literal!r}")
        return ParameterValue(ptype, BlobRef(blob_id, bytes.fromhex(m.group(2))))
    if ptype is PrimitiveType.STRING_ARRAY:
        return ParameterValue(ptype, _parse_string_array(literal))
    # int[] / float[]
    body = _array_body(literal)
    if body.strip() == "":
        return ParameterValue(ptype, ())
    parts = [s.strip() for s in body.split(",")]
    if ptype is PrimitiveType.INT_ARRAY:
        return ParameterValue(ptype, tuple(_parse_int(s) for s in parts))
    return ParameterValue(ptype, tuple(_parse_float(s) for s in parts))


def _parse_int(literal: str) -> int:
    if not _INT_RE.match(literal):
        raise MalformedLiteral(f"malformed int literal {literal!r}")
    v = int(literal)
    if not (INT64_MIN <= v <= INT64_MAX):
        raise MalformedLiteral(f"int literal out of 64-bit range: {literal}")
    return v


def _parse_float(literal: str) -> float:
    if not _FLOAT_RE.match(literal):
        raise MalformedLiteral(f"malformed float literal {literal!r}")
    v = float(literal)
    if not math.isfinite(v):
        raise NonFiniteFloat(f"float literal overflows to non-finite: {literal}")
    return v


def _array_body(literal: str) -> str:
    if not (literal.startswith("[") and literal.endswith("]")) or len(literal) < 2:
        raise MalformedLiteral(f"array literal must be bracketed, got {literal!r}")
    return literal[1:-1]


def _parse_string_array(literal: str) -> tuple[str, ...]:
    body = _array_body(literal)
    i, n = 0, len(body)
    items: list[str] = []
    while i < n and body[i] in " \t":
        i += 1
    if i == n:
        return ()
    while True:
        if i >= n or body[i] != '"':
            raise MalformedLiteral(f"string array element must be quoted at offset {i}")
        try:
            item, i = _json_decoder.raw_decode(body, i)
        except ValueError as exc:
            raise MalformedLiteral(f"bad string array element: {exc}") from None
        items.append(item)
        while i < n and body[i] in " \t":
            i += 1
        if i == n:
            return tuple(items)
        if body[i] != ",":
            raise MalformedLiteral(f"expected ',' in string array at offset {i}")
        i += 1
        while i < n and body[i] in " \t":
            i += 1


@dataclass(frozen=True)
class ScopePath:
    """Hierarchical container path. Canonical text is "/" plus segments
    joined by "/"; the root is "/"."""

    segments: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        for seg in self.segments:
            if not IDENTIFIER_RE.match(seg):
                raise MalformedPath(f"bad scope segment {seg!r}")

    @classmethod
    def parse(cls, text: str) -> ScopePath:
        if text == "/":
            return cls(())
        if not text.startswith("/") or text.endswith("/"):
            raise MalformedPath(f"scope path must be absolute without trailing slash: {text!r}")
        return cls(tuple(text[1:].split("/")))

    @property
    def text(self) -> str:
        return "/" + "/".join(self.segments)

    @property
    def parent(self) -> ScopePath | None:
        if not self.segments:
            return None
        return ScopePath(self.segments[:-1])

    def child(self, segment: str) -> ScopePath:
        return ScopePath(self.segments + (segment,))

    def is_ancestor_or_self(self, other: ScopePath) -> bool:
        return other.segments[: len(self.segments)] == self.segments

    def __str__(self) -> str:
        return self.text


@dataclass(frozen=True)
class FieldSpec:
    """One dictionary field: name, type, and descriptive metadata."""

    name: str
    type: PrimitiveType
    comment: str = ""
    unit: str | None = None
    default: ParameterValue | None = None
    index: int = 0

    def __post_init__(self):
        if not IDENTIFIER_RE.match(self.name):
            raise ValueError(f"bad field name {self.name!r}")
        if self.unit == "":
            object.__setattr__(self, "unit", None)
        if self.default is not None and self.default.type is not self.type:
            raise ValueError(
                f"default for {self.name} has type {self.default.type.tag}, "
                f"field is {self.type.tag}")


@dataclass(frozen=True)
class DataDictionary:
    """Versioned ordered schema for one parameter-collection class."""

    class_name: str
    dict_version: int
    fields: tuple[FieldSpec, ...]

    def __post_init__(self):
        if not IDENTIFIER_RE.match(self.class_name):
            raise ValueError(f"bad class name {self.class_name!r}")
        if self.dict_version < 1:
            raise ValueError("dict_version must be >= 1")
        object.__setattr__(self, "fields", tuple(self.fields))
        seen = set()
        for i, spec in enumerate(self.fields):
            if spec.index != i:
                raise ValueError(f"field {spec.name} has index {spec.index}, expected {i}")
            if spec.name in seen:
                raise ValueError(f"duplicate field name {spec.name!r}")
            seen.add(spec.name)

    def field_names(self) -> tuple[str, ...]:
        return tuple(spec.name for spec in self.fields)

    def find(self, name: str) -> FieldSpec | None:
        for spec in self.fields:
            if spec.name == name:
                return spec
        return None


def make_dictionary(class_name: str, dict_version: int,
                    fields: list[FieldSpec] | tuple[FieldSpec, ...]) -> DataDictionary:
    """Build a dictionary, assigning field indices by position."""
    indexed = tuple(replace(spec, index=i) for i, spec in enumerate(fields))
    return DataDictionary(class_name, dict_version, indexed)


@dataclass(frozen=True)
class CollectionInstance:
    """One versioned object: values aligned one-to-one with the fields of the
    dictionary version it is bound to.

    ``field_names`` is convenience metadata mirroring that dictionary's field
    order; it never participates in equality.
    """

    class_name: str
    instance_name: str
    scope: ScopePath
    dict_version: int
    object_version: int
    values: tuple[ParameterValue, ...]
    field_names: tuple[str, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        if not IDENTIFIER_RE.match(self.class_name):
            raise ValueError(f"bad class name {self.class_name!r}")
        if not IDENTIFIER_RE.match(self.instance_name):
            raise ValueError(f"bad instance name {self.instance_name!r}")
        object.__setattr__(self, "values", tuple(self.values))
        if self.field_names is not None:
            object.__setattr__(self, "field_names", tuple(self.field_names))


def default_value(spec: FieldSpec) -> ParameterValue:
    """Declared default if present, else the type's zero value. Blob fields
    have no zero value."""
    if spec.default is not None:
        return spec.default
    t = spec.type
    if t is PrimitiveType.INT:
        return ParameterValue(t, 0)
    if t is PrimitiveType.FLOAT:
        return ParameterValue(t, 0.0)
    if t is PrimitiveType.BOOL:
        return ParameterValue(t, False)
    if t is PrimitiveType.STRING:
        return ParameterValue(t, "")
    if t.is_array:
        return ParameterValue(t, ())
    raise NoDefaultForBlob(f"blob field {spec.name!r} has no default")


@dataclass(frozen=True)
class Issue:
    """One entry in a validation report."""

    code: str
    field: str | None = None
    detail: str = ""


@dataclass
class ValidationReport:
    errors: list[Issue] = field(default_factory=list)
    notices: list[Issue] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def summary(self) -> str:
        return "; ".join(
            f"{i.code}({i.field})" if i.field else i.code for i in self.errors)


def validate_collection(instance: CollectionInstance,
                        dictionary: DataDictionary) -> ValidationReport:
    """Check value count, order, and types against *dictionary*.

    Int values against float fields pass with a widening notice; every other
    type mismatch is an error.
    """
    if instance.class_name != dictionary.class_name:
        raise ValueError(
            f"class mismatch: instance {instance.class_name}, "
            f"dictionary {dictionary.class_name}")
    report = ValidationReport()
    nfields = len(dictionary.fields)
    for i, value in enumerate(instance.values):
        if i >= nfields:
            report.errors.append(Issue("ExtraValue", None, f"value at index {i}"))
            continue
        spec = dictionary.fields[i]
        if value.type is spec.type:
            continue
        if value.type is PrimitiveType.INT and spec.type is PrimitiveType.FLOAT:
            report.notices.append(
                Issue("WidenedIntToFloat", spec.name, "int value widened to float"))
            continue
        report.errors.append(Issue(
            "TypeMismatch", spec.name,
            f"expected {spec.type.tag}, got {value.type.tag}"))
    for spec in dictionary.fields[len(instance.values):]:
        report.errors.append(Issue("MissingField", spec.name))
    return report


def apply_widening(values: tuple[ParameterValue, ...],
                   dictionary: DataDictionary) -> tuple[ParameterValue, ...]:
    """Return *values* with int payloads widened to float where the dictionary
    field is float-typed. Storage never keeps an int in a float field."""
    out = []
    for value, spec in zip(values, dictionary.fields):
        if value.type is PrimitiveType.INT and spec.type is PrimitiveType.FLOAT:
            out.append(ParameterValue(PrimitiveType.FLOAT, float(value.payload)))
        else:
            out.append(value)
    return tuple(out)
