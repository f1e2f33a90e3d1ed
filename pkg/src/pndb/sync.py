"""One-way master -> replica replication via checksummed changesets.

Wire format (normative, all integers big-endian):

    magic            ``PNDB-SYNC-1\\n`` (12 bytes)
    source store id  16 bytes
    from_seq         8 bytes
    to_seq           8 bytes
    record count     8 bytes
    records          per record: 8-byte seq, 1-byte op code, 4-byte payload
                     length, payload bytes
    trailer          SHA-256 over everything above (32 bytes)

A changeset covers the half-open sequence range (from_seq, to_seq]. Applying
requires contiguity with the replica's current sequence, which also makes
re-application of an already-applied range fail cleanly.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass

from pndb.errors import ChecksumMismatch, FutureSequence
from pndb.store import ChangeOp, ChangeRecord, Store

MAGIC = b"PNDB-SYNC-1\n"
_U64 = struct.Struct(">Q")
_RECORD_HEAD = struct.Struct(">QBI")


@dataclass(frozen=True)
class Changeset:
    source_id: bytes
    from_seq: int
    to_seq: int
    records: tuple[ChangeRecord, ...]


def export_changes(master: Store, since: int) -> Changeset:
    """Changeset covering (since, current seq] of *master*."""
    with master.lock:
        if since > master.seq:
            raise FutureSequence(
                f"since {since} is beyond current seq {master.seq}")
        records = tuple(master.records_after(since))
        return Changeset(master.store_id, since, master.seq, records)


def encode_changeset(cs: Changeset) -> bytes:
    parts = [MAGIC, cs.source_id, _U64.pack(cs.from_seq), _U64.pack(cs.to_seq),
             _U64.pack(len(cs.records))]
    for record in cs.records:
        parts.append(encode_record(record))
    body = b"".join(parts)
    return body + hashlib.sha256(body).digest()


def encode_record(record: ChangeRecord) -> bytes:
    return _RECORD_HEAD.pack(record.seq, record.op, len(record.payload)) \
        + record.payload


def decode_changeset(data: bytes) -> Changeset:
    """Parse and verify a changeset; any mismatch between the bytes and the
    trailer is a checksum failure."""
    if len(data) < len(MAGIC) + 16 + 24 + 32:
        raise ChecksumMismatch("changeset truncated")
    body, trailer = data[:-32], data[-32:]
    if hashlib.sha256(body).digest() != trailer:
        raise ChecksumMismatch("changeset trailer does not verify")
    if not body.startswith(MAGIC):
        raise ChecksumMismatch("bad changeset magic")
    offset = len(MAGIC)
    source_id = body[offset:offset + 16]
    offset += 16
    from_seq = _U64.unpack_from(body, offset)[0]
    to_seq = _U64.unpack_from(body, offset + 8)[0]
    count = _U64.unpack_from(body, offset + 16)[0]
    offset += 24
    records = []
    for _ in range(count):
        if offset + _RECORD_HEAD.size > len(body):
            raise ChecksumMismatch("changeset record table truncated")
        seq, op, length = _RECORD_HEAD.unpack_from(body, offset)
        offset += _RECORD_HEAD.size
        if offset + length > len(body):
            raise ChecksumMismatch("changeset record payload truncated")
        records.append(ChangeRecord(seq, ChangeOp(op), body[offset:offset + length]))
        offset += length
    if offset != len(body):
        raise ChecksumMismatch("trailing garbage in changeset")
    return Changeset(source_id, from_seq, to_seq, tuple(records))


def apply_changes(replica: Store, cs: Changeset) -> int:
    """Replay *cs* onto *replica*; returns the replica's new sequence."""
    return replica.replica_apply(cs.source_id, cs.from_seq, list(cs.records))
