"""FastAPI application exposing one store over HTTP.

The store handle lives for the lifetime of the app. All mutating routes go
through the same core operations as the CLI, so behaviour is identical on
both surfaces. Domain errors map to JSON bodies {"error": code, "detail":
message}: not-found conditions give 404, conflicts with existing state give
409, everything else a domain error covers gives 400.
"""

from __future__ import annotations

from contextlib import asynccontextmanager
from pathlib import Path

from fastapi import FastAPI, Query, Request, Response
from fastapi.responses import JSONResponse

from pndb import iov as iovmod
from pndb import sync as syncmod
from pndb import tableio, xmlio
from pndb.converters import internalize
from pndb.errors import (
    DuplicateFolder,
    DuplicateTag,
    FutureSequence,
    MalformedAddress,
    NonMonotonicSince,
    NotFound,
    NoValidEntry,
    PndbError,
    UnknownClass,
    UnknownFolder,
    UnknownTag,
)
from pndb.iov import HEAD, INFINITY, IovEntry
from pndb.model import ScopePath, render_primitive
from pndb.service import schemas
from pndb.store import Store, StoreMode

_NOT_FOUND = (NotFound, UnknownClass, UnknownFolder, UnknownTag, NoValidEntry)
_CONFLICT = (DuplicateFolder, DuplicateTag, NonMonotonicSince, FutureSequence)


def _status_for(exc: PndbError) -> int:
    if isinstance(exc, _NOT_FOUND):
        return 404
    if isinstance(exc, _CONFLICT):
        return 409
    return 400


def _entry_model(entry: IovEntry) -> schemas.IovEntryModel:
    try:
        addr = internalize(entry.payload)
        address = schemas.AddressModel(
            class_name=addr.class_name, instance=addr.instance_name,
            object_version=addr.object_version, dict_version=addr.dict_version)
    except MalformedAddress:
        address = None
    until = None if entry.interval.until == INFINITY else entry.interval.until
    return schemas.IovEntryModel(since=entry.interval.since, until=until,
                                 payload=entry.payload, address=address)


def _import_report_model(report: xmlio.ImportReport) -> schemas.ImportReportModel:
    return schemas.ImportReportModel(
        ok=not report.errors, collections=report.collections,
        dictionaries=report.dictionaries, warnings=report.warnings,
        errors=report.errors)


def create_app(store_path: str | Path,
               mode: StoreMode = StoreMode.READ_WRITE) -> FastAPI:
    """Application bound to the store directory at *store_path*; the store
    is opened on startup and closed on shutdown."""

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        app.state.store = Store.open(store_path, mode)
        try:
            yield
        finally:
            app.state.store.close()

    app = FastAPI(title="pndb", lifespan=lifespan)

    @app.exception_handler(PndbError)
    async def domain_error(_request: Request, exc: PndbError):
        return JSONResponse(status_code=_status_for(exc),
                            content={"error": exc.code, "detail": str(exc)})

    def store() -> Store:
        return app.state.store

    # --- browsing ---

    @app.get("/api/status", response_model=schemas.StatusModel)
    def status():
        s = store()
        return schemas.StatusModel(
            store_id=s.store_id.hex(), mode=s.mode.value, seq=s.seq,
            master_id=s.master_id.hex() if s.master_id else None,
            applied_seq=s.applied_seq)

    @app.get("/api/scopes", response_model=schemas.ScopeModel)
    def scopes(path: str = "/"):
        scope = ScopePath.parse(path)
        children, instances = store().list_scope(scope)
        return schemas.ScopeModel(
            path=scope.text, children=children,
            collections=[schemas.CollectionKeyModel(class_name=c, instance=i)
                         for c, i in instances])

    @app.get("/api/classes", response_model=schemas.ClassListModel)
    def classes():
        s = store()
        with s.lock:
            infos = [schemas.ClassInfoModel(
                name=name,
                latest_dict_version=s.get_dictionary(name).dict_version)
                for name in s.list_classes()]
        return schemas.ClassListModel(classes=infos)

    @app.get("/api/classes/{class_name}/dictionary",
             response_model=schemas.DictionaryModel)
    def dictionary(class_name: str, d: int | None = Query(default=None, ge=1)):
        dic = store().get_dictionary(class_name, d)
        fields = [schemas.FieldSpecModel(
            name=f.name, type=f.type.tag, unit=f.unit, comment=f.comment,
            default=None if f.default is None else render_primitive(f.default))
            for f in dic.fields]
        return schemas.DictionaryModel(class_name=dic.class_name,
                                       dict_version=dic.dict_version,
                                       fields=fields)

    @app.get("/api/objects/{class_name}/{instance}/versions",
             response_model=schemas.ObjectVersionsModel)
    def object_versions(class_name: str, instance: str):
        s = store()
        with s.lock:
            versions = [
                schemas.ObjectVersionModel(
                    object_version=ref.object_version,
                    dict_version=ref.dict_version,
                    scope=s.get_object(class_name, instance,
                                       ref.object_version).scope.text)
                for ref in s.object_versions(class_name, instance)]
        return schemas.ObjectVersionsModel(class_name=class_name,
                                           instance=instance,
                                           versions=versions)

    @app.get("/api/objects/{class_name}/{instance}",
             response_model=schemas.ObjectModel)
    def get_object(class_name: str, instance: str,
                   v: int | None = Query(default=None, ge=1)):
        s = store()
        with s.lock:
            obj = s.get_object(class_name, instance, v)
            dic = s.get_dictionary(class_name, obj.dict_version)
        params = [schemas.ParamModel(
            name=f.name, type=f.type.tag, value=render_primitive(value),
            unit=f.unit, comment=f.comment)
            for f, value in zip(dic.fields, obj.values)]
        return schemas.ObjectModel(
            class_name=class_name, instance=instance, scope=obj.scope.text,
            dict_version=obj.dict_version, object_version=obj.object_version,
            params=params)

    # --- interval-of-validity folders ---

    @app.post("/api/folders", response_model=schemas.FolderModel, status_code=201)
    def create_folder(body: schemas.FolderCreateRequest):
        iovmod.create_folder(store(), body.path, body.description)
        return schemas.FolderModel(path=body.path, description=body.description,
                                   tags=[HEAD])

    @app.get("/api/folders", response_model=schemas.FolderListModel)
    def list_folders():
        return schemas.FolderListModel(folders=[
            schemas.FolderModel(path=p, description=d, tags=t)
            for p, d, t in store().list_folders()])

    @app.get("/api/iov/{folder:path}/entries",
             response_model=schemas.IovEntriesModel)
    def iov_entries(folder: str, tag: str = HEAD):
        entries = iovmod.iov_list(store(), folder, tag)
        return schemas.IovEntriesModel(
            folder=folder, tag=tag, entries=[_entry_model(e) for e in entries])

    @app.post("/api/iov/{folder:path}/tags",
              response_model=schemas.TagCreatedModel, status_code=201)
    def tag_head(folder: str, body: schemas.TagRequest):
        count = iovmod.tag_head(store(), folder, body.tag)
        return schemas.TagCreatedModel(folder=folder, tag=body.tag,
                                       entries=count)

    @app.get("/api/iov/{folder:path}", response_model=schemas.IovResolveModel)
    def iov_resolve(folder: str, t: int = Query(ge=0), tag: str = HEAD):
        entry = iovmod.iov_resolve(store(), folder, tag, t)
        base = _entry_model(entry)
        return schemas.IovResolveModel(folder=folder, tag=tag, t=t,
                                       **base.model_dump(by_alias=False))

    @app.post("/api/iov/{folder:path}", response_model=schemas.IovEntryModel,
              status_code=201)
    def iov_store(folder: str, body: schemas.IovStoreRequest):
        entry = iovmod.iov_store(store(), folder, body.since, body.payload)
        return _entry_model(entry)

    # --- import and export ---

    @app.get("/api/export/xml")
    def export_xml(scope: str | None = None):
        parsed = ScopePath.parse(scope) if scope is not None else None
        doc = xmlio.export_xml(store(), parsed)
        return Response(content=doc, media_type="application/xml")

    @app.post("/api/import/xml", response_model=schemas.ImportReportModel)
    async def import_xml(request: Request):
        body = (await request.body()).decode("utf-8")
        return _import_report_model(xmlio.import_xml(store(), body))

    @app.post("/api/import/table", response_model=schemas.ImportReportModel)
    async def import_table(request: Request):
        body = (await request.body()).decode("utf-8")
        return _import_report_model(tableio.import_table(store(), body))

    # --- blobs ---

    @app.get("/api/blobs/{blob_id}")
    def get_blob(blob_id: int):
        data, ref = store().get_blob_bytes(blob_id)
        return Response(content=data, media_type="application/octet-stream",
                        headers={"X-Checksum-SHA256": ref.checksum.hex()})

    # --- replication feed ---

    @app.get("/api/sync/changes")
    def sync_changes(since: int = Query(default=0, ge=0)):
        cs = syncmod.export_changes(store(), since)
        return Response(content=syncmod.encode_changeset(cs),
                        media_type="application/octet-stream")

    return app
