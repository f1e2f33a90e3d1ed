"""Persistent versioned object store.

Logical schema (normative): dictionary catalog, object revisions, value rows,
content-addressed blobs, and an append-only change log. The physical layout
is a directory:

    MANIFEST        format version "PNDB-STORE-1", store id, current seq,
                    master id and applied seq for replicas
    changelog.bin   framed change records: 8-byte BE seq, 1-byte op code,
                    4-byte BE payload length, canonical JSON payload
    blobs/<id>      raw blob bytes, one file per blob id
    .lock           present while a writer holds the store

The change log is the source of truth: opening a store replays every record
through the same transition code used for live commits, so replaying records
1..seq into an empty store reproduces every read answer by construction
(this is also what one-way replication relies on).

Committed data is never updated or deleted; revisions only accumulate.

Concurrency: one internal lock serializes mutations; reads take the same
lock briefly and therefore always observe a consistent state no older than
call entry. Writer exclusivity across processes is enforced with a lock
file.
"""

from __future__ import annotations

import base64
import hashlib
import json
import logging
import os
import secrets
import struct
import threading
from dataclasses import dataclass
from enum import Enum, IntEnum
from pathlib import Path

from pndb import evolution, iov as iovmod
from pndb.errors import (
    ChecksumMismatch,
    NotFound,
    ReadOnlyStore,
    StoreCorrupt,
    StoreLocked,
    StoreModeError,
    UnknownClass,
    ValidationFailed,
    WrongMaster,
    LocalMutationConflict,
    NonContiguous,
)
from pndb.model import (
    BlobRef,
    CollectionInstance,
    DataDictionary,
    FieldSpec,
    ParameterValue,
    PrimitiveType,
    ScopePath,
    apply_widening,
    make_dictionary,
    parse_primitive,
    render_primitive,
    validate_collection,
)

logger = logging.getLogger(__name__)

STORE_FORMAT = "PNDB-STORE-1"
_MANIFEST = "MANIFEST"
_CHANGELOG = "changelog.bin"
_LOCKFILE = ".lock"
_FRAME = struct.Struct(">QBI")


class StoreMode(Enum):
    READ_WRITE = "rw"
    READ_ONLY = "ro"
    REPLICA = "replica"


class ChangeOp(IntEnum):
    PUT_DICTIONARY = 1
    PUT_OBJECT = 2
    PUT_BLOB = 3
    CREATE_FOLDER = 4
    IOV_STORE = 5
    TAG_HEAD = 6


@dataclass(frozen=True)
class ChangeRecord:
    seq: int
    op: ChangeOp
    payload: bytes


@dataclass(frozen=True)
class ObjectRef:
    class_name: str
    instance_name: str
    object_version: int
    dict_version: int


@dataclass(frozen=True)
class _Revision:
    object_version: int
    dict_version: int
    scope: ScopePath
    values: tuple[ParameterValue, ...]


def canonical_json(payload: dict) -> bytes:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"),
                      ensure_ascii=True).encode("ascii")


def _fields_payload(fields: tuple[FieldSpec, ...]) -> list[dict]:
    out = []
    for spec in fields:
        out.append({
            "name": spec.name,
            "type": spec.type.tag,
            "unit": spec.unit,
            "comment": spec.comment,
            "default": None if spec.default is None
            else render_primitive(spec.default),
        })
    return out


def _fields_from_payload(items: list[dict]) -> list[FieldSpec]:
    fields = []
    for item in items:
        ptype = PrimitiveType.from_tag(item["type"])
        default = None
        if item.get("default") is not None:
            default = parse_primitive(ptype.tag, item["default"])
        fields.append(FieldSpec(
            name=item["name"], type=ptype, comment=item.get("comment", ""),
            unit=item.get("unit"), default=default))
    return fields


class Store:
    """One store directory opened in a given mode.

    Only one writing handle (READ_WRITE or REPLICA) may hold a store at a
    time; concurrent READ_ONLY handles see whatever was durably committed
    when they opened.
    """

    def __init__(self, root: Path, mode: StoreMode, create: bool):
        self.root = Path(root)
        self.mode = mode
        self.lock = threading.RLock()
        self._closed = False
        self._log_fh = None

        if create:
            self.root.mkdir(parents=True, exist_ok=True)
            (self.root / "blobs").mkdir(exist_ok=True)
            self.store_id = secrets.token_bytes(16)
            self.master_id: bytes | None = None
            self.seq = 0
            self.applied_seq = 0
        elif not (self.root / _MANIFEST).exists():
            raise NotFound(f"no store at {self.root}")

        self._dicts: dict[str, list[DataDictionary]] = {}
        self._objects: dict[tuple[str, str], list[_Revision]] = {}
        self._scope_children: dict[str, set[str]] = {}
        self._scope_instances: dict[str, set[tuple[str, str]]] = {}
        self._blob_ids: dict[bytes, int] = {}
        self._blob_meta: dict[int, tuple[int, bytes]] = {}
        self._next_blob_id = 1
        self.iov = iovmod.IovState()
        self._records: list[ChangeRecord] = []

        if mode in (StoreMode.READ_WRITE, StoreMode.REPLICA):
            self._acquire_lockfile()
        try:
            if not create:
                self._read_manifest()
                self._replay_log()
            if mode is not StoreMode.READ_ONLY:
                self._log_fh = open(self.root / _CHANGELOG, "ab")
            if create:
                self._write_manifest()
        except BaseException:
            self._release_lockfile()
            raise

    # --- lifecycle ---

    @classmethod
    def create(cls, path: str | Path) -> Store:
        path = Path(path)
        if (path / _MANIFEST).exists():
            raise StoreModeError(f"store already exists at {path}")
        return cls(path, StoreMode.READ_WRITE, create=True)

    @classmethod
    def open(cls, path: str | Path, mode: StoreMode = StoreMode.READ_WRITE) -> Store:
        return cls(Path(path), mode, create=False)

    @classmethod
    def open_or_create(cls, path: str | Path,
                       mode: StoreMode = StoreMode.READ_WRITE) -> Store:
        if (Path(path) / _MANIFEST).exists():
            return cls.open(path, mode)
        store = cls.create(path)
        if mode is not StoreMode.READ_WRITE:
            store.close()
            store = cls.open(path, mode)
        return store

    def close(self) -> None:
        if self._closed:
            return
        self._closed = True
        if self._log_fh is not None:
            self._log_fh.close()
        self._release_lockfile()

    def __enter__(self) -> Store:
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def _acquire_lockfile(self) -> None:
        try:
            fd = os.open(self.root / _LOCKFILE, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            raise StoreLocked(
                f"store {self.root} is already held by a writer") from None
        with os.fdopen(fd, "w") as fh:
            fh.write(str(os.getpid()))
        self._holds_lockfile = True

    def _release_lockfile(self) -> None:
        if getattr(self, "_holds_lockfile", False):
            (self.root / _LOCKFILE).unlink(missing_ok=True)
            self._holds_lockfile = False

    # --- manifest and log ---

    def _write_manifest(self) -> None:
        master = self.master_id.hex() if self.master_id else "-"
        text = (f"{STORE_FORMAT}\n"
                f"store-id={self.store_id.hex()}\n"
                f"seq={self.seq}\n"
                f"master-id={master}\n"
                f"applied-seq={self.applied_seq}\n")
        tmp = self.root / (_MANIFEST + ".tmp")
        tmp.write_text(text, encoding="ascii")
        os.replace(tmp, self.root / _MANIFEST)

    def _read_manifest(self) -> None:
        lines = (self.root / _MANIFEST).read_text(encoding="ascii").splitlines()
        if not lines or lines[0] != STORE_FORMAT:
            raise StoreCorrupt(f"bad store format marker in {self.root / _MANIFEST}")
        kv = dict(line.split("=", 1) for line in lines[1:] if "=" in line)
        self.store_id = bytes.fromhex(kv["store-id"])
        self._manifest_seq = int(kv["seq"])
        master = kv.get("master-id", "-")
        self.master_id = None if master == "-" else bytes.fromhex(master)
        self.applied_seq = int(kv.get("applied-seq", "0"))
        self.seq = 0

    def _replay_log(self) -> None:
        log_path = self.root / _CHANGELOG
        if not log_path.exists():
            return
        data = log_path.read_bytes()
        offset = 0
        while offset < len(data):
            if offset + _FRAME.size > len(data):
                logger.warning("ignoring partial trailing frame header in %s", log_path)
                break
            seq, op, length = _FRAME.unpack_from(data, offset)
            if offset + _FRAME.size + length > len(data):
                logger.warning("ignoring partial trailing record in %s", log_path)
                break
            payload = data[offset + _FRAME.size: offset + _FRAME.size + length]
            offset += _FRAME.size + length
            record = ChangeRecord(seq, ChangeOp(op), payload)
            if record.seq != self.seq + 1:
                raise StoreCorrupt(
                    f"change log sequence gap: expected {self.seq + 1}, "
                    f"found {record.seq}")
            self._apply(record)
            self._records.append(record)
            self.seq = record.seq
        if offset < len(data) and self.mode is not StoreMode.READ_ONLY:
            # drop the torn tail so the next append starts at a frame boundary
            with open(log_path, "r+b") as fh:
                fh.truncate(offset)
        if self.seq != self._manifest_seq:
            logger.warning("manifest seq %d disagrees with change log (%d); "
                           "the log wins", self._manifest_seq, self.seq)

    def _append(self, record: ChangeRecord) -> None:
        self._log_fh.write(_FRAME.pack(record.seq, record.op, len(record.payload)))
        self._log_fh.write(record.payload)
        self._log_fh.flush()

    def _commit(self, op: ChangeOp, payload: dict):
        """Append a record and run it through the shared transition code."""
        record = ChangeRecord(self.seq + 1, op, canonical_json(payload))
        self._append(record)
        result = self._apply(record)
        self._records.append(record)
        self.seq = record.seq
        self._write_manifest()
        return result

    # --- transitions (live commit and replay both land here) ---

    def _apply(self, record: ChangeRecord):
        payload = json.loads(record.payload)
        op = record.op
        if op is ChangeOp.PUT_DICTIONARY:
            return self._apply_put_dictionary(payload)
        if op is ChangeOp.PUT_OBJECT:
            return self._apply_put_object(payload)
        if op is ChangeOp.PUT_BLOB:
            return self._apply_put_blob(payload)
        if op is ChangeOp.CREATE_FOLDER:
            return self.iov.apply_create_folder(payload["path"], payload["description"])
        if op is ChangeOp.IOV_STORE:
            return self.iov.apply_store(payload["folder"], payload["since"],
                                        payload["payload"], record.seq)
        if op is ChangeOp.TAG_HEAD:
            return self.iov.apply_tag_head(payload["folder"], payload["tag"])
        raise StoreCorrupt(f"unknown change op {op}")

    def _apply_put_dictionary(self, payload: dict) -> DataDictionary:
        dictionary = make_dictionary(payload["class"], payload["version"],
                                     _fields_from_payload(payload["fields"]))
        versions = self._dicts.setdefault(dictionary.class_name, [])
        if dictionary.dict_version != len(versions) + 1:
            raise StoreCorrupt(
                f"dictionary version jump for {dictionary.class_name}: "
                f"{dictionary.dict_version} after {len(versions)}")
        versions.append(dictionary)
        return dictionary

    def _apply_put_object(self, payload: dict) -> _Revision:
        class_name = payload["class"]
        dictionary = self._dicts[class_name][payload["dict_version"] - 1]
        values = tuple(
            parse_primitive(spec.type.tag, text)
            for spec, text in zip(dictionary.fields, payload["values"]))
        scope = ScopePath.parse(payload["scope"])
        key = (class_name, payload["instance"])
        revisions = self._objects.setdefault(key, [])
        revision = _Revision(payload["object_version"], payload["dict_version"],
                             scope, values)
        if revisions:
            old_scope = revisions[-1].scope.text
            if old_scope != scope.text:
                self._scope_instances.get(old_scope, set()).discard(key)
        revisions.append(revision)
        self._index_scope(scope, key)
        return revision

    def _index_scope(self, scope: ScopePath, key: tuple[str, str]) -> None:
        self._scope_instances.setdefault(scope.text, set()).add(key)
        node = scope
        while node.parent is not None:
            parent = node.parent
            self._scope_children.setdefault(parent.text, set()).add(node.text)
            node = parent

    def _apply_put_blob(self, payload: dict) -> BlobRef:
        blob_id = payload["blob_id"]
        checksum = bytes.fromhex(payload["checksum"])
        data = base64.b64decode(payload["data"])
        path = self._blob_path(blob_id)
        if not path.exists():
            path.parent.mkdir(exist_ok=True)
            path.write_bytes(data)
        self._blob_ids[checksum] = blob_id
        self._blob_meta[blob_id] = (payload["length"], checksum)
        self._next_blob_id = max(self._next_blob_id, blob_id + 1)
        return BlobRef(blob_id, checksum, payload["length"])

    def _blob_path(self, blob_id: int) -> Path:
        return self.root / "blobs" / str(blob_id)

    # --- mode checks ---

    def check_writable(self) -> None:
        if self.mode is not StoreMode.READ_WRITE:
            raise ReadOnlyStore(
                f"store opened in {self.mode.value} mode rejects local mutations")

    # --- dictionary catalog ---

    def register_class(self, class_name: str, fields,
                       force_new_version: bool = False) -> tuple[str, int]:
        """Register a dictionary for *class_name*.

        Re-registering a field list identical to the latest version is a
        no-op returning that version; anything else becomes version
        latest+1, provided the evolution from the latest version is
        compatible. *force_new_version* skips the idempotence shortcut.
        """
        self.check_writable()
        with self.lock:
            versions = self._dicts.get(class_name, [])
            candidate = make_dictionary(class_name, len(versions) + 1, list(fields))
            if versions:
                latest = versions[-1]
                if not force_new_version and (
                        _fields_payload(latest.fields)
                        == _fields_payload(candidate.fields)):
                    return class_name, latest.dict_version
                evolution.diff_dictionaries(latest, candidate)  # compatibility gate
            payload = {
                "class": class_name,
                "version": candidate.dict_version,
                "fields": _fields_payload(candidate.fields),
            }
            self._commit(ChangeOp.PUT_DICTIONARY, payload)
            return class_name, candidate.dict_version

    def get_dictionary(self, class_name: str, dict_version: int | None = None
                       ) -> DataDictionary:
        with self.lock:
            versions = self._dicts.get(class_name)
            if not versions:
                raise UnknownClass(f"no class {class_name!r}")
            if dict_version is None:
                return versions[-1]
            if not 1 <= dict_version <= len(versions):
                raise NotFound(f"no dictionary {class_name} v{dict_version}")
            return versions[dict_version - 1]

    def dictionary_versions(self, class_name: str) -> list[int]:
        with self.lock:
            versions = self._dicts.get(class_name)
            if not versions:
                raise UnknownClass(f"no class {class_name!r}")
            return list(range(1, len(versions) + 1))

    def list_classes(self) -> list[str]:
        with self.lock:
            return sorted(self._dicts)

    # --- objects ---

    def put_object(self, class_name: str, instance_name: str, scope: ScopePath,
                   values) -> ObjectRef:
        """Store a new revision of (class, instance), validated and bound to
        the latest dictionary version."""
        self.check_writable()
        with self.lock:
            if class_name not in self._dicts:
                raise UnknownClass(f"no class {class_name!r}")
            dictionary = self._dicts[class_name][-1]
            revisions = self._objects.get((class_name, instance_name), [])
            object_version = len(revisions) + 1
            instance = CollectionInstance(
                class_name=class_name, instance_name=instance_name, scope=scope,
                dict_version=dictionary.dict_version, object_version=object_version,
                values=tuple(values))
            report = validate_collection(instance, dictionary)
            if not report.ok:
                raise ValidationFailed(report.summary(), report=report)
            stored = apply_widening(instance.values, dictionary)
            payload = {
                "class": class_name,
                "instance": instance_name,
                "object_version": object_version,
                "dict_version": dictionary.dict_version,
                "scope": scope.text,
                "values": [render_primitive(v) for v in stored],
            }
            self._commit(ChangeOp.PUT_OBJECT, payload)
            return ObjectRef(class_name, instance_name, object_version,
                             dictionary.dict_version)

    def get_object(self, class_name: str, instance_name: str,
                   object_version: int | None = None) -> CollectionInstance:
        with self.lock:
            revisions = self._objects.get((class_name, instance_name))
            if not revisions:
                raise NotFound(f"no object {class_name}/{instance_name}")
            if object_version is None:
                revision = revisions[-1]
            elif 1 <= object_version <= len(revisions):
                revision = revisions[object_version - 1]
            else:
                raise NotFound(
                    f"no object {class_name}/{instance_name} v{object_version}")
            names = self._dicts[class_name][revision.dict_version - 1].field_names()
            return CollectionInstance(
                class_name=class_name, instance_name=instance_name,
                scope=revision.scope, dict_version=revision.dict_version,
                object_version=revision.object_version, values=revision.values,
                field_names=names)

    def object_versions(self, class_name: str, instance_name: str
                        ) -> list[ObjectRef]:
        with self.lock:
            revisions = self._objects.get((class_name, instance_name))
            if not revisions:
                raise NotFound(f"no object {class_name}/{instance_name}")
            return [ObjectRef(class_name, instance_name, r.object_version,
                              r.dict_version) for r in revisions]

    def list_instances(self) -> list[tuple[str, str]]:
        with self.lock:
            return sorted(self._objects)

    def list_scope(self, scope: ScopePath) -> tuple[list[str], list[tuple[str, str]]]:
        """Immediate child scopes (canonical text, sorted) and the instances
        located exactly at *scope*, sorted by (class, instance)."""
        with self.lock:
            children = sorted(self._scope_children.get(scope.text, ()))
            instances = sorted(self._scope_instances.get(scope.text, ()))
            return children, instances

    # --- blobs ---

    def put_blob(self, data: bytes) -> BlobRef:
        """Content-addressed: identical bytes always return the same ref and
        commit at most one change record."""
        self.check_writable()
        with self.lock:
            checksum = hashlib.sha256(data).digest()
            existing = self._blob_ids.get(checksum)
            if existing is not None:
                length, _ = self._blob_meta[existing]
                return BlobRef(existing, checksum, length)
            payload = {
                "blob_id": self._next_blob_id,
                "length": len(data),
                "checksum": checksum.hex(),
                "data": base64.b64encode(data).decode("ascii"),
            }
            return self._commit(ChangeOp.PUT_BLOB, payload)

    def get_blob(self, ref: BlobRef) -> bytes:
        data, stored = self._read_blob(ref.blob_id)
        if stored.checksum != ref.checksum:
            raise NotFound(
                f"blob {ref.blob_id} does not match requested checksum")
        return data

    def get_blob_bytes(self, blob_id: int) -> tuple[bytes, BlobRef]:
        data, ref = self._read_blob(blob_id)
        return data, ref

    def _read_blob(self, blob_id: int) -> tuple[bytes, BlobRef]:
        with self.lock:
            meta = self._blob_meta.get(blob_id)
            if meta is None:
                raise NotFound(f"no blob {blob_id}")
            length, checksum = meta
        data = self._blob_path(blob_id).read_bytes()
        actual = hashlib.sha256(data).digest()
        if actual != checksum or len(data) != length:
            raise ChecksumMismatch(
                f"blob {blob_id} bytes do not match recorded checksum")
        return data, BlobRef(blob_id, checksum, length)

    # --- interval-of-validity commits (invoked by pndb.iov operations) ---

    def commit_create_folder(self, path: str, description: str):
        return self._commit(ChangeOp.CREATE_FOLDER,
                            {"path": path, "description": description})

    def commit_iov_store(self, path: str, since: int, payload: str):
        return self._commit(ChangeOp.IOV_STORE,
                            {"folder": path, "since": since, "payload": payload})

    def commit_tag_head(self, path: str, tag: str) -> int:
        return self._commit(ChangeOp.TAG_HEAD, {"folder": path, "tag": tag})

    def list_folders(self) -> list[tuple[str, str, list[str]]]:
        with self.lock:
            out = []
            for path in sorted(self.iov.folders):
                folder = self.iov.folders[path]
                tags = sorted(folder.tags)
                out.append((path, folder.description, tags))
            return out

    # --- change log access (replication) ---

    def records_after(self, since: int) -> list[ChangeRecord]:
        with self.lock:
            return self._records[since:]

    def replica_apply(self, source_id: bytes, from_seq: int,
                      records: list[ChangeRecord]) -> int:
        """Replay master records onto this replica. The caller has already
        verified the changeset envelope (magic and trailer)."""
        if self.mode is not StoreMode.REPLICA:
            raise StoreModeError("apply_changes requires a store opened in "
                                 "replica mode")
        with self.lock:
            if self.seq != self.applied_seq:
                raise LocalMutationConflict(
                    f"replica has {self.seq - self.applied_seq} local "
                    f"mutations beyond the last applied changeset")
            if self.master_id is not None and source_id != self.master_id:
                raise WrongMaster(
                    f"changeset from {source_id.hex()}, replica follows "
                    f"{self.master_id.hex()}")
            if from_seq != self.seq:
                raise NonContiguous(self.seq, from_seq)
            for record in records:
                if record.seq != self.seq + 1:
                    raise NonContiguous(self.seq + 1, record.seq)
                self._append(record)
                self._apply(record)
                self._records.append(record)
                self.seq = record.seq
            if self.master_id is None:
                self.master_id = source_id
            self.applied_seq = self.seq
            self._write_manifest()
            return self.seq
