"""Line-oriented table import for bulk-loading parameter collections.

Format: directives set the target, rows add one parameter each.

    #class ATLASMotherVolume
    #instance default
    #scope /ATLAS
    Version|int|2||2001 VERSION WITH ENDCAP SHIFTED B
    Rmax|float|1400.0||Outer Radius

Rows carry exactly five pipe-separated fields: name|type|value|unit|comment.
Whitespace around each field is trimmed; blank lines and "#"-prefixed
comments (other than the three directives) are skipped. A #class directive
flushes the collection gathered so far, so one file can load many
collections. Commit is transactional through the XML import path: the whole
file is staged first and nothing lands if any row is bad.
"""

from __future__ import annotations

from pndb.errors import MalformedRow, PndbError
from pndb.model import (
    FieldSpec,
    PrimitiveType,
    ScopePath,
    parse_primitive,
)
from pndb.store import Store
from pndb.xmlio import ImportReport, _commit_staged, _StagedCollection

DEFAULT_INSTANCE = "default"


def import_table(store: Store, text: str) -> ImportReport:
    """Parse *text* and commit every collection it defines, atomically."""
    store.check_writable()
    staged: list[_StagedCollection] = []
    current: _StagedCollection | None = None
    class_name: str | None = None
    instance_name = DEFAULT_INSTANCE
    scope = ScopePath.parse("/")
    seen: set[str] = set()

    def flush() -> None:
        nonlocal current
        if current is not None:
            staged.append(current)
            current = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            directive, _, arg = line.partition(" ")
            arg = arg.strip()
            if directive == "#class":
                if not arg:
                    raise MalformedRow(lineno, "#class needs a class name")
                flush()
                class_name = arg
                instance_name = DEFAULT_INSTANCE
                scope = ScopePath.parse("/")
                seen = set()
            elif directive == "#instance":
                if not arg:
                    raise MalformedRow(lineno, "#instance needs a name")
                flush()
                instance_name = arg
                seen = set()
            elif directive == "#scope":
                try:
                    scope = ScopePath.parse(arg)
                except PndbError as exc:
                    raise MalformedRow(lineno, str(exc)) from None
                if current is not None:
                    current.scope = scope
            # any other "#" line is a comment
            continue

        if class_name is None:
            raise MalformedRow(lineno, "row before any #class directive")
        parts = [p.strip() for p in line.split("|")]
        if len(parts) != 5:
            raise MalformedRow(
                lineno, f"expected 5 pipe-separated fields, got {len(parts)}")
        name, type_tag, literal, unit, comment = parts
        if name in seen:
            raise MalformedRow(
                lineno, f"duplicate parameter {name!r} in "
                        f"{class_name}/{instance_name}")
        seen.add(name)
        try:
            ptype = PrimitiveType.from_tag(type_tag)
            value = parse_primitive(type_tag, literal)
        except PndbError as exc:
            raise MalformedRow(lineno, str(exc)) from None
        if current is None:
            current = _StagedCollection(class_name, instance_name, scope, [], [])
        current.fields.append(FieldSpec(name=name, type=ptype, comment=comment,
                                        unit=unit or None))
        current.values.append(value)

    flush()
    return _commit_staged(store, staged, ImportReport())
