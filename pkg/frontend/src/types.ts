/** Wire shapes of the pndb HTTP API. Property names match the JSON bodies,
 * including the reserved-looking "class" key. Values are canonical text
 * literals, the same form the XML and table formats use. */

export interface FieldSpec {
  name: string;
  type: string;
  unit: string | null;
  comment: string;
  default: string | null;
}

export interface Dictionary {
  class: string;
  dict_version: number;
  fields: FieldSpec[];
}

export interface ClassInfo {
  name: string;
  latest_dict_version: number;
}

export interface Param {
  name: string;
  type: string;
  value: string;
  unit: string | null;
  comment: string;
}

export interface StoredObject {
  class: string;
  instance: string;
  scope: string;
  dict_version: number;
  object_version: number;
  params: Param[];
}

export interface ObjectVersion {
  object_version: number;
  dict_version: number;
  scope: string;
}

export interface ObjectVersions {
  class: string;
  instance: string;
  versions: ObjectVersion[];
}

export interface CollectionKey {
  class: string;
  instance: string;
}

export interface Scope {
  path: string;
  children: string[];
  collections: CollectionKey[];
}

export interface Address {
  class: string;
  instance: string;
  object_version: number;
  dict_version: number;
}

/** until is null for an open-ended entry. */
export interface IovEntry {
  since: number;
  until: number | null;
  payload: string;
  address: Address | null;
}

export interface IovResolve extends IovEntry {
  folder: string;
  tag: string;
  t: number;
}

export interface IovEntries {
  folder: string;
  tag: string;
  entries: IovEntry[];
}

export interface Folder {
  path: string;
  description: string;
  tags: string[];
}

export interface ImportReport {
  ok: boolean;
  collections: number;
  dictionaries: number;
  warnings: string[];
  errors: string[];
}

export interface Status {
  store_id: string;
  mode: string;
  seq: number;
  master_id: string | null;
  applied_seq: number;
}
