"""Interval-of-validity database: folders map a tag and a half-open validity
interval [since, until) to an externalized opaque-address string.

HEAD is the mutable working tag. Storing appends an open-ended entry and
truncates the previous open one, so entries within a (folder, tag) stay
pairwise disjoint by construction. Named tags are immutable snapshots of
HEAD.

State transitions live here so that both live mutations and change-log
replay go through the same code path.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from pndb.errors import (
    DuplicateFolder,
    DuplicateTag,
    EmptyHead,
    InvalidTagName,
    MalformedPath,
    NonMonotonicSince,
    NoValidEntry,
    ReservedTagName,
    UnknownFolder,
    UnknownTag,
)
from pndb.model import IDENTIFIER_RE, UINT64_MAX

INFINITY = UINT64_MAX
"""Reserved open upper bound; never contained in any half-open interval."""

HEAD = "HEAD"

_FOLDER_SEGMENT_RE = IDENTIFIER_RE


@dataclass(frozen=True)
class IntervalOfValidity:
    since: int
    until: int

    def __post_init__(self):
        if not (0 <= self.since < self.until <= INFINITY):
            raise ValueError(f"bad interval [{self.since}, {self.until})")

    def contains(self, t: int) -> bool:
        return self.since <= t < self.until

    @property
    def open_ended(self) -> bool:
        return self.until == INFINITY


@dataclass(frozen=True)
class IovEntry:
    folder: str
    tag: str
    interval: IntervalOfValidity
    payload: str
    inserted_seq: int


@dataclass
class FolderState:
    path: str
    description: str
    tags: dict = field(default_factory=dict)  # tag name -> list[IovEntry]

    def __post_init__(self):
        self.tags.setdefault(HEAD, [])


def check_folder_path(path: str) -> str:
    segments = path.split("/")
    if not segments or any(not _FOLDER_SEGMENT_RE.match(s) for s in segments):
        raise MalformedPath(f"bad folder path {path!r}")
    return path


class IovState:
    """All folders of one store. Mutated only via the apply_* transitions."""

    def __init__(self):
        self.folders: dict[str, FolderState] = {}

    def folder(self, path: str) -> FolderState:
        folder = self.folders.get(path)
        if folder is None:
            raise UnknownFolder(f"no folder {path!r}")
        return folder

    def entries(self, path: str, tag: str) -> list[IovEntry]:
        folder = self.folder(path)
        if tag not in folder.tags:
            raise UnknownTag(f"no tag {tag!r} in folder {path!r}")
        return folder.tags[tag]

    # --- transitions (called on commit and on replay) ---

    def apply_create_folder(self, path: str, description: str) -> FolderState:
        folder = FolderState(path=path, description=description)
        self.folders[path] = folder
        return folder

    def apply_store(self, path: str, since: int, payload: str,
                    seq: int) -> IovEntry:
        head = self.folders[path].tags[HEAD]
        if head and head[-1].interval.open_ended:
            prev = head[-1]
            head[-1] = replace(
                prev, interval=IntervalOfValidity(prev.interval.since, since))
        entry = IovEntry(path, HEAD, IntervalOfValidity(since, INFINITY),
                         payload, seq)
        head.append(entry)
        return entry

    def apply_tag_head(self, path: str, tag: str) -> int:
        folder = self.folders[path]
        snapshot = [replace(e, tag=tag) for e in folder.tags[HEAD]]
        folder.tags[tag] = snapshot
        return len(snapshot)


# --- operations over a store ---

def create_folder(store, path: str, description: str = "") -> FolderState:
    check_folder_path(path)
    store.check_writable()
    with store.lock:
        if path in store.iov.folders:
            raise DuplicateFolder(f"folder {path!r} already exists")
        return store.commit_create_folder(path, description)


def iov_store(store, path: str, since: int, payload: str) -> IovEntry:
    """Append an open-ended entry [since, INFINITY) to HEAD, truncating the
    previous open entry to end at *since*."""
    store.check_writable()
    if not (0 <= since < INFINITY):
        raise NonMonotonicSince(f"since out of range: {since}")
    with store.lock:
        head = store.iov.entries(path, HEAD)
        if head:
            last = head[-1]
            if since <= last.interval.since:
                raise NonMonotonicSince(
                    f"since {since} not greater than current head since "
                    f"{last.interval.since}")
        return store.commit_iov_store(path, since, payload)


def iov_resolve(store, path: str, tag: str, t: int) -> IovEntry:
    """The unique entry in (folder, tag) whose interval contains *t*;
    intervals are disjoint so binary search by since suffices."""
    with store.lock:
        entries = store.iov.entries(path, tag)
        lo, hi = 0, len(entries)
        while lo < hi:
            mid = (lo + hi) // 2
            if entries[mid].interval.since <= t:
                lo = mid + 1
            else:
                hi = mid
        if lo > 0 and entries[lo - 1].interval.contains(t):
            return entries[lo - 1]
        raise NoValidEntry(f"no entry valid at t={t} in {path!r} tag {tag!r}")


def tag_head(store, path: str, tag: str) -> int:
    """Snapshot the current HEAD entry set under an immutable tag name."""
    store.check_writable()
    if not tag or tag.strip() != tag:
        raise InvalidTagName(f"bad tag name {tag!r}")
    if tag == HEAD:
        raise ReservedTagName("HEAD is the mutable working tag")
    with store.lock:
        folder = store.iov.folder(path)
        if tag in folder.tags:
            raise DuplicateTag(f"tag {tag!r} already exists in {path!r}")
        if not folder.tags[HEAD]:
            raise EmptyHead(f"folder {path!r} has no HEAD entries to tag")
        return store.commit_tag_head(path, tag)


def iov_list(store, path: str, tag: str) -> list[IovEntry]:
    """Entries of (folder, tag) ordered by since."""
    with store.lock:
        return list(store.iov.entries(path, tag))
