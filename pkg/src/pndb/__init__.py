"""Versioned detector-parameter database.

Parameter collections are described by persistent data dictionaries, stored
as append-only change logs, addressed by opaque versioned URIs, resolved
through interval-of-validity folders, and replicated one way from a master
to read-only replicas.
"""

from __future__ import annotations

from pndb.errors import PndbError
from pndb.model import (
    CollectionInstance,
    DataDictionary,
    FieldSpec,
    ParameterValue,
    PrimitiveType,
    ScopePath,
)
from pndb.store import Store, StoreMode

__all__ = [
    "CollectionInstance",
    "DataDictionary",
    "FieldSpec",
    "ParameterValue",
    "PndbError",
    "PrimitiveType",
    "ScopePath",
    "Store",
    "StoreMode",
]

__version__ = "0.1.0"
