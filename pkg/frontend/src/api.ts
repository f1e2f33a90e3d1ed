import type {
  ClassInfo,
  Dictionary,
  Folder,
  ImportReport,
  IovEntries,
  IovResolve,
  ObjectVersions,
  Scope,
  Status,
  StoredObject,
} from "./types.js";

/** A failed API call; code is the server's error identifier, for example
 * "UnknownClass" or "NoValidEntry". */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    detail: string,
  ) {
    super(`${code}: ${detail}`);
    this.name = "ApiError";
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

async function handle<T>(response: Response): Promise<T> {
  if (response.ok) return (await response.json()) as T;
  let code = `HTTP${response.status}`;
  let detail = response.statusText;
  try {
    const body = (await response.json()) as { error?: string; detail?: string };
    if (body.error) code = body.error;
    if (body.detail) detail = body.detail;
  } catch {
    // non-JSON error body; keep the HTTP status
  }
  throw new ApiError(response.status, code, detail);
}

/** Thin typed client over the HTTP API. The fetch function is injectable so
 * tests can serve canned responses without a network. */
export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private get<T>(path: string, query?: Record<string, string>): Promise<T> {
    let url = this.base + path;
    if (query && Object.keys(query).length > 0) {
      url += "?" + new URLSearchParams(query).toString();
    }
    return this.fetchFn(url).then((r) => handle<T>(r));
  }

  status(): Promise<Status> {
    return this.get("/api/status");
  }

  scope(path: string): Promise<Scope> {
    return this.get("/api/scopes", { path });
  }

  classes(): Promise<ClassInfo[]> {
    return this.get<{ classes: ClassInfo[] }>("/api/classes").then(
      (body) => body.classes,
    );
  }

  dictionary(className: string, dictVersion?: number): Promise<Dictionary> {
    const query: Record<string, string> = {};
    if (dictVersion !== undefined) query.d = String(dictVersion);
    return this.get(
      `/api/classes/${encodeURIComponent(className)}/dictionary`,
      query,
    );
  }

  object(
    className: string,
    instance: string,
    objectVersion?: number,
  ): Promise<StoredObject> {
    const query: Record<string, string> = {};
    if (objectVersion !== undefined) query.v = String(objectVersion);
    return this.get(
      `/api/objects/${encodeURIComponent(className)}/${encodeURIComponent(instance)}`,
      query,
    );
  }

  versions(className: string, instance: string): Promise<ObjectVersions> {
    return this.get(
      `/api/objects/${encodeURIComponent(className)}/${encodeURIComponent(instance)}/versions`,
    );
  }

  folders(): Promise<Folder[]> {
    return this.get<{ folders: Folder[] }>("/api/folders").then(
      (body) => body.folders,
    );
  }

  entries(folder: string, tag: string): Promise<IovEntries> {
    return this.get(`/api/iov/${folder}/entries`, { tag });
  }

  resolve(folder: string, tag: string, t: number): Promise<IovResolve> {
    return this.get(`/api/iov/${folder}`, { tag, t: String(t) });
  }

  async exportXml(scope?: string): Promise<string> {
    let url = this.base + "/api/export/xml";
    if (scope !== undefined) {
      url += "?" + new URLSearchParams({ scope }).toString();
    }
    const response = await this.fetchFn(url);
    if (!response.ok) return handle<string>(response);
    return response.text();
  }

  async importTable(text: string): Promise<ImportReport> {
    const response = await this.fetchFn(this.base + "/api/import/table", {
      method: "POST",
      headers: { "Content-Type": "text/plain" },
      body: text,
    });
    return handle<ImportReport>(response);
  }
}
