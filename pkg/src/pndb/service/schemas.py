"""Request and response bodies for the HTTP API.

Values travel as canonical text literals, the same form the XML and table
formats use, so clients never need a second parser. "class" is a reserved
word in Python, hence the alias on class_name.
"""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field


class _Aliased(BaseModel):
    model_config = ConfigDict(populate_by_name=True)


class FieldSpecModel(_Aliased):
    name: str
    type: str
    unit: str | None = None
    comment: str = ""
    default: str | None = None


class DictionaryModel(_Aliased):
    class_name: str = Field(alias="class")
    dict_version: int
    fields: list[FieldSpecModel]


class ClassInfoModel(_Aliased):
    name: str
    latest_dict_version: int


class ClassListModel(_Aliased):
    classes: list[ClassInfoModel]


class ParamModel(_Aliased):
    name: str
    type: str
    value: str
    unit: str | None = None
    comment: str = ""


class ObjectModel(_Aliased):
    class_name: str = Field(alias="class")
    instance: str
    scope: str
    dict_version: int
    object_version: int
    params: list[ParamModel]


class ObjectVersionModel(_Aliased):
    object_version: int
    dict_version: int
    scope: str


class ObjectVersionsModel(_Aliased):
    class_name: str = Field(alias="class")
    instance: str
    versions: list[ObjectVersionModel]


class CollectionKeyModel(_Aliased):
    class_name: str = Field(alias="class")
    instance: str


class ScopeModel(_Aliased):
    path: str
    children: list[str]
    collections: list[CollectionKeyModel]


class AddressModel(_Aliased):
    class_name: str = Field(alias="class")
    instance: str
    object_version: int
    dict_version: int


class IovEntryModel(_Aliased):
    since: int
    until: int | None
    payload: str
    address: AddressModel | None = None


class IovResolveModel(IovEntryModel):
    folder: str
    tag: str
    t: int


class IovEntriesModel(_Aliased):
    folder: str
    tag: str
    entries: list[IovEntryModel]


class IovStoreRequest(_Aliased):
    since: int = Field(ge=0)
    payload: str


class TagRequest(_Aliased):
    tag: str


class TagCreatedModel(_Aliased):
    folder: str
    tag: str
    entries: int


class FolderCreateRequest(_Aliased):
    path: str
    description: str = ""


class FolderModel(_Aliased):
    path: str
    description: str
    tags: list[str]


class FolderListModel(_Aliased):
    folders: list[FolderModel]


class ImportReportModel(_Aliased):
    ok: bool
    collections: int
    dictionaries: int
    warnings: list[str]
    errors: list[str]


class StatusModel(_Aliased):
    store_id: str
    mode: str
    seq: int
    master_id: str | None
    applied_seq: int
