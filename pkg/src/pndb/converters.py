"""Opaque addresses and the conversion service.

An address names one stored object revision under one dictionary view and
externalizes to the exact string form

    nova://<class>/<instance>?v=<object_version>&d=<dict_version>

``retrieve`` hides addressing and interval-of-validity resolution from the
caller: a key is either an IOV folder path (resolved through the current
event context) or a direct externalized address, and the built object is
cached in a per-context transient store.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable

from pndb import iov as iovmod
from pndb.errors import (
    CacheContextMismatch,
    DuplicateConverter,
    MalformedAddress,
    NoConverter,
)
from pndb.evolution import materialize_view
from pndb.model import (
    BlobRef,
    CollectionInstance,
    IDENTIFIER_RE,
    ParameterValue,
    PrimitiveType,
)
from pndb.store import ObjectRef

_ADDRESS_RE = re.compile(
    r"nova://([A-Za-z_][A-Za-z0-9_]*)/([A-Za-z_][A-Za-z0-9_]*)"
    r"\?v=([1-9][0-9]*)&d=([1-9][0-9]*)\Z")


@dataclass(frozen=True)
class OpaqueAddress:
    class_name: str
    instance_name: str
    object_version: int
    dict_version: int

    def __post_init__(self):
        if not IDENTIFIER_RE.match(self.class_name):
            raise ValueError(f"bad class name {self.class_name!r}")
        if not IDENTIFIER_RE.match(self.instance_name):
            raise ValueError(f"bad instance name {self.instance_name!r}")
        if self.object_version < 1 or self.dict_version < 1:
            raise ValueError("versions must be >= 1")


def externalize(addr: OpaqueAddress) -> str:
    return (f"nova://{addr.class_name}/{addr.instance_name}"
            f"?v={addr.object_version}&d={addr.dict_version}")


def internalize(s: str) -> OpaqueAddress:
    """Inverse of ``externalize`` on its image; anything else is malformed,
    including version 0 and non-canonical digits."""
    m = _ADDRESS_RE.match(s)
    if not m:
        raise MalformedAddress(f"not a valid address string: {s!r}")
    return OpaqueAddress(m.group(1), m.group(2), int(m.group(3)), int(m.group(4)))


BlobLoader = Callable[[BlobRef], bytes]


@dataclass(frozen=True)
class ConverterSpec:
    class_name: str
    build: Callable[[CollectionInstance, BlobLoader], object]


def generic_converter(class_name: str) -> ConverterSpec:
    """Builds a plain name -> python value mapping; blob fields stay as refs."""

    def build(instance: CollectionInstance, _loader: BlobLoader) -> dict:
        if instance.field_names is None:
            raise ValueError("instance is not bound to field names")
        return {name: _to_python(v)
                for name, v in zip(instance.field_names, instance.values)}

    return ConverterSpec(class_name, build)


def _to_python(value: ParameterValue):
    if value.type.is_array:
        return list(value.payload)
    return value.payload


class ConverterRegistry:
    """One converter per class name; optionally falls back to the generic
    mapping converter for unregistered classes."""

    def __init__(self, use_generic_default: bool = False):
        self._specs: dict[str, ConverterSpec] = {}
        self._use_generic_default = use_generic_default

    def register(self, spec: ConverterSpec) -> None:
        if spec.class_name in self._specs:
            raise DuplicateConverter(
                f"converter for {spec.class_name!r} already registered")
        self._specs[spec.class_name] = spec

    def lookup(self, class_name: str) -> ConverterSpec:
        spec = self._specs.get(class_name)
        if spec is not None:
            return spec
        if self._use_generic_default:
            return generic_converter(class_name)
        raise NoConverter(f"no converter registered for {class_name!r}")


def register_converter(registry: ConverterRegistry, spec: ConverterSpec) -> None:
    registry.register(spec)


@dataclass(frozen=True)
class RetrievalContext:
    """Event scope: the timestamp used for IOV resolution plus the tag
    selected for this processing run."""

    timestamp: int
    tag: str = iovmod.HEAD


@dataclass
class TransientStore:
    """Per-context cache of built objects keyed by retrieval key. Confine
    one instance to one logical worker; reset it between event contexts."""

    context: RetrievalContext | None = None
    _cache: dict = field(default_factory=dict)

    def reset(self) -> None:
        self.context = None
        self._cache.clear()

    def bind(self, ctx: RetrievalContext) -> None:
        if self.context is None:
            self.context = ctx
        elif self.context != ctx:
            raise CacheContextMismatch(
                "transient store already bound to a different retrieval "
                "context; reset it first")

    def cached(self, key: str):
        return self._cache.get(key)

    def put(self, key: str, obj: object, addr: OpaqueAddress) -> None:
        self._cache[key] = (obj, addr)


def retrieve(store, registry: ConverterRegistry, tstore: TransientStore,
             key: str, ctx: RetrievalContext):
    """Build (or fetch from cache) the transient object for *key*.

    A key containing "://" is a direct externalized address; any other key
    is an IOV folder path resolved at the context's timestamp and tag. The
    object is loaded, viewed under the dictionary version the address names,
    converted, and cached under *key* for the lifetime of the context.
    """
    tstore.bind(ctx)
    hit = tstore.cached(key)
    if hit is not None:
        return hit[0]
    if "://" in key:
        addr = internalize(key)
    else:
        entry = iovmod.iov_resolve(store, key, ctx.tag, ctx.timestamp)
        addr = internalize(entry.payload)
    ref = ObjectRef(addr.class_name, addr.instance_name, addr.object_version,
                    addr.dict_version)
    view = materialize_view(store, ref, addr.dict_version)
    spec = registry.lookup(addr.class_name)
    built = spec.build(view.instance, store.get_blob)
    tstore.put(key, built, addr)
    return built
