from __future__ import annotations

import hashlib
import random

import pytest

from pndb import iov
from pndb.errors import (
    ChecksumMismatch,
    FutureSequence,
    LocalMutationConflict,
    NonContiguous,
    StoreModeError,
    WrongMaster,
)
from pndb.model import FieldSpec, ParameterValue, PrimitiveType, ScopePath
from pndb.store import Store, StoreMode
from pndb.sync import (
    MAGIC,
    Changeset,
    apply_changes,
    decode_changeset,
    encode_changeset,
    export_changes,
)


def _master(tmp_path, name="m"):
    store = Store.create(tmp_path / name)
    store.register_class("C", [FieldSpec("a", PrimitiveType.INT)])
    store.put_object("C", "x", ScopePath.parse("/A"),
                     [ParameterValue(PrimitiveType.INT, 1)])
    store.put_blob(b"blob bytes")
    iov.create_folder(store, "f")
    iov.iov_store(store, "f", 10, "nova://C/x?v=1&d=1")
    iov.tag_head(store, "f", "t1")
    return store


def _replica(tmp_path, name="r"):
    Store.create(tmp_path / name).close()
    return Store.open(tmp_path / name, StoreMode.REPLICA)


# --- wire format ---


def test_empty_changeset_encodes_and_decodes(tmp_path):
    with _master(tmp_path) as master:
        cs = export_changes(master, master.seq)
        data = encode_changeset(cs)
        assert len(data) == len(MAGIC) + 16 + 24 + 32
        back = decode_changeset(data)
        assert back == cs
        assert back.records == ()


def test_changeset_round_trip(tmp_path):
    with _master(tmp_path) as master:
        cs = export_changes(master, 0)
        back = decode_changeset(encode_changeset(cs))
        assert back == cs
        assert back.from_seq == 0
        assert back.to_seq == master.seq
        assert len(back.records) == master.seq


def test_changeset_trailer_is_sha256_of_body(tmp_path):
    with _master(tmp_path) as master:
        data = encode_changeset(export_changes(master, 0))
        assert data[-32:] == hashlib.sha256(data[:-32]).digest()
        assert data.startswith(MAGIC)


def test_flipped_bit_detected_anywhere(tmp_path):
    with _master(tmp_path) as master:
        data = bytearray(encode_changeset(export_changes(master, 0)))
    rng = random.Random(3)
    for _ in range(40):
        i = rng.randrange(len(data))
        corrupted = bytearray(data)
        corrupted[i] ^= 0x40
        with pytest.raises(ChecksumMismatch):
            decode_changeset(bytes(corrupted))


def test_truncation_detected(tmp_path):
    with _master(tmp_path) as master:
        data = encode_changeset(export_changes(master, 0))
    for cut in (0, 10, len(data) // 2, len(data) - 1):
        with pytest.raises(ChecksumMismatch):
            decode_changeset(data[:cut])


def test_appended_garbage_detected(tmp_path):
    with _master(tmp_path) as master:
        data = encode_changeset(export_changes(master, 0))
    with pytest.raises(ChecksumMismatch):
        decode_changeset(data + b"x")


def test_export_future_sequence_rejected(tmp_path):
    with _master(tmp_path) as master:
        with pytest.raises(FutureSequence):
            export_changes(master, master.seq + 1)


# --- applying ---


def test_full_sync_replicates_all_read_surfaces(tmp_path):
    with _master(tmp_path) as master, _replica(tmp_path) as replica:
        applied = apply_changes(replica, export_changes(master, 0))
        assert applied == master.seq
        assert replica.get_object("C", "x") == master.get_object("C", "x")
        assert replica.list_scope(ScopePath.parse("/")) \
            == master.list_scope(ScopePath.parse("/"))
        assert replica.get_blob_bytes(1)[0] == b"blob bytes"
        assert replica.list_folders() == master.list_folders()
        assert iov.iov_resolve(replica, "f", "t1", 10).payload \
            == iov.iov_resolve(master, "f", "t1", 10).payload
        assert replica.applied_seq == master.seq
        assert replica.master_id == master.store_id


def test_incremental_sync(tmp_path):
    with _master(tmp_path) as master, _replica(tmp_path) as replica:
        apply_changes(replica, export_changes(master, 0))
        master.put_object("C", "x", ScopePath.parse("/A"),
                          [ParameterValue(PrimitiveType.INT, 2)])
        apply_changes(replica, export_changes(master, replica.seq))
        assert replica.get_object("C", "x").values[0].payload == 2


def test_split_sync_equals_one_shot_at_changeset_level(tmp_path):
    with _master(tmp_path) as master:
        split = master.seq // 2
        one_shot = export_changes(master, 0)
        first_half = Changeset(master.store_id, 0, split,
                               one_shot.records[:split])
        second_half = Changeset(master.store_id, split, master.seq,
                                one_shot.records[split:])
        # the two encoded ranges concatenate, record for record, to the
        # one-shot encoding
        assert encode_changeset(first_half)[52:-32] \
            + encode_changeset(second_half)[52:-32] \
            == encode_changeset(one_shot)[52:-32]
        with _replica(tmp_path, "r1") as r1, _replica(tmp_path, "r2") as r2:
            apply_changes(r1, decode_changeset(encode_changeset(one_shot)))
            apply_changes(r2, decode_changeset(encode_changeset(first_half)))
            apply_changes(r2, decode_changeset(encode_changeset(second_half)))
            assert r1.seq == r2.seq == master.seq
            r1_log = (tmp_path / "r1" / "changelog.bin").read_bytes()
            r2_log = (tmp_path / "r2" / "changelog.bin").read_bytes()
            assert r1_log == r2_log


def test_apply_requires_replica_mode(tmp_path):
    with _master(tmp_path) as master:
        cs = export_changes(master, 0)
        Store.create(tmp_path / "w").close()
        with Store.open(tmp_path / "w") as rw:
            with pytest.raises(StoreModeError):
                apply_changes(rw, cs)


def test_apply_noncontiguous_rejected(tmp_path):
    with _master(tmp_path) as master, _replica(tmp_path) as replica:
        cs = export_changes(master, 2)
        with pytest.raises(NonContiguous) as exc:
            apply_changes(replica, cs)
        assert exc.value.expected == 0
        assert exc.value.got == 2


def test_reapplying_same_range_rejected(tmp_path):
    with _master(tmp_path) as master, _replica(tmp_path) as replica:
        cs = export_changes(master, 0)
        apply_changes(replica, cs)
        with pytest.raises(NonContiguous):
            apply_changes(replica, cs)


def test_wrong_master_rejected(tmp_path):
    with _master(tmp_path, "m1") as m1, _master(tmp_path / "sub") as m2, \
            _replica(tmp_path) as replica:
        apply_changes(replica, export_changes(m1, 0))
        m2.put_blob(b"novel")
        with pytest.raises(WrongMaster):
            apply_changes(replica, export_changes(m2, replica.seq))


def test_local_mutations_block_sync(tmp_path):
    with _master(tmp_path) as master:
        cs = export_changes(master, 0)
    # a store that committed its own records is no longer a clean replica
    with Store.create(tmp_path / "dirty") as s:
        s.put_blob(b"local divergence")
    with Store.open(tmp_path / "dirty", StoreMode.REPLICA) as dirty:
        with pytest.raises(LocalMutationConflict):
            apply_changes(dirty, cs)


def test_replica_survives_reopen(tmp_path):
    with _master(tmp_path) as master:
        cs = export_changes(master, 0)
        expected = master.get_object("C", "x")
    with _replica(tmp_path) as replica:
        apply_changes(replica, cs)
    with Store.open(tmp_path / "r", StoreMode.REPLICA) as replica:
        assert replica.get_object("C", "x") == expected
        assert replica.applied_seq == replica.seq


def test_replicated_log_bytes_identical(tmp_path):
    with _master(tmp_path) as master, _replica(tmp_path) as replica:
        apply_changes(replica, export_changes(master, 0))
    master_log = (tmp_path / "m" / "changelog.bin").read_bytes()
    replica_log = (tmp_path / "r" / "changelog.bin").read_bytes()
    assert master_log == replica_log
