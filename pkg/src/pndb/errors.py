"""Exception hierarchy. Every error carries a stable machine-readable code
that the HTTP layer and the CLI surface verbatim."""

from __future__ import annotations


class PndbError(Exception):
    """Base class for all domain errors."""

    code = "Error"

    def __init__(self, detail: str = ""):
        self.detail = detail
        super().__init__(detail or self.code)

    def __str__(self) -> str:
        return self.detail or self.code


# --- value model ---

class UnknownType(PndbError):
    code = "UnknownType"


class MalformedLiteral(PndbError):
    code = "MalformedLiteral"


class NonFiniteFloat(PndbError):
    code = "NonFiniteFloat"


class NoDefaultForBlob(PndbError):
    code = "NoDefaultForBlob"


class MalformedPath(PndbError):
    code = "MalformedPath"


# --- storage ---

class ValidationFailed(PndbError):
    code = "ValidationFailed"

    def __init__(self, detail: str = "", report=None):
        super().__init__(detail)
        self.report = report


class UnknownClass(PndbError):
    code = "UnknownClass"


class NotFound(PndbError):
    code = "NotFound"


class ReadOnlyStore(PndbError):
    code = "ReadOnlyStore"


class StoreLocked(PndbError):
    code = "StoreLocked"


class StoreModeError(PndbError):
    code = "StoreMode"


class StoreCorrupt(PndbError):
    code = "StoreCorrupt"


class ChecksumMismatch(PndbError):
    code = "ChecksumMismatch"


# --- evolution ---

class IncompatibleEvolution(PndbError):
    code = "IncompatibleEvolution"


# --- interval-of-validity ---

class DuplicateFolder(PndbError):
    code = "DuplicateFolder"


class UnknownFolder(PndbError):
    code = "UnknownFolder"


class UnknownTag(PndbError):
    code = "UnknownTag"


class NoValidEntry(PndbError):
    code = "NoValidEntry"


class NonMonotonicSince(PndbError):
    code = "NonMonotonicSince"


class EmptyHead(PndbError):
    code = "EmptyHead"


class DuplicateTag(PndbError):
    code = "DuplicateTag"


class ReservedTagName(PndbError):
    code = "ReservedTagName"


class InvalidTagName(PndbError):
    code = "InvalidTagName"


# --- conversion / addressing ---

class MalformedAddress(PndbError):
    code = "MalformedAddress"


class DuplicateConverter(PndbError):
    code = "DuplicateConverter"


class NoConverter(PndbError):
    code = "NoConverter"


class CacheContextMismatch(PndbError):
    code = "CacheContextMismatch"


# --- replication ---

class FutureSequence(PndbError):
    code = "FutureSequence"


class WrongMaster(PndbError):
    code = "WrongMaster"


class NonContiguous(PndbError):
    code = "NonContiguous"

    def __init__(self, expected: int, got: int):
        super().__init__(f"expected changeset starting at seq {expected}, got {got}")
        self.expected = expected
        self.got = got


class LocalMutationConflict(PndbError):
    code = "LocalMutationConflict"


# --- import / export ---

class XmlParseError(PndbError):
    code = "XmlParseError"


class MalformedRow(PndbError):
    code = "MalformedRow"

    def __init__(self, line: int, detail: str = ""):
        super().__init__(f"line {line}: {detail}" if detail else f"line {line}")
        self.line = line
