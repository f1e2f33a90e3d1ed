/** Hash-fragment routes, so every view is a shareable deep link:
 *
 *   #/scopes/ATLAS/Inner
 *   #/objects/ATLASMotherVolume/default?v=2&diff=1
 *   #/iov/mag/solenoid?tag=prod1&t=150
 *
 * The scopes route embeds the scope path minus its leading slash separator,
 * so the root scope is "#/scopes/".
 */

export type Route =
  | { view: "scopes"; path: string }
  | { view: "objects"; class: string; instance: string; v?: number; diff?: number }
  | { view: "iov"; folder: string; tag: string; t?: number };

export const DEFAULT_ROUTE: Route = { view: "scopes", path: "/" };

function intOrUndefined(raw: string | null): number | undefined {
  if (raw === null || !/^[0-9]+$/.test(raw)) return undefined;
  return Number(raw);
}

export function parseHash(hash: string): Route {
  const raw = hash.startsWith("#") ? hash.slice(1) : hash;
  const qmark = raw.indexOf("?");
  const pathPart = qmark === -1 ? raw : raw.slice(0, qmark);
  const query = new URLSearchParams(qmark === -1 ? "" : raw.slice(qmark + 1));

  if (pathPart.startsWith("/scopes/")) {
    const scope = pathPart.slice("/scopes".length);
    return { view: "scopes", path: scope === "" ? "/" : scope };
  }
  if (pathPart.startsWith("/objects/")) {
    const rest = pathPart.slice("/objects/".length).split("/");
    if (rest.length === 2 && rest[0] !== "" && rest[1] !== "") {
      return {
        view: "objects",
        class: decodeURIComponent(rest[0]!),
        instance: decodeURIComponent(rest[1]!),
        v: intOrUndefined(query.get("v")),
        diff: intOrUndefined(query.get("diff")),
      };
    }
  }
  if (pathPart.startsWith("/iov/")) {
    const folder = pathPart.slice("/iov/".length);
    if (folder !== "") {
      return {
        view: "iov",
        folder,
        tag: query.get("tag") ?? "HEAD",
        t: intOrUndefined(query.get("t")),
      };
    }
  }
  return DEFAULT_ROUTE;
}

export function formatHash(route: Route): string {
  switch (route.view) {
    case "scopes":
      return `#/scopes${route.path}`;
    case "objects": {
      const query = new URLSearchParams();
      if (route.v !== undefined) query.set("v", String(route.v));
      if (route.diff !== undefined) query.set("diff", String(route.diff));
      const suffix = query.toString() === "" ? "" : `?${query.toString()}`;
      const cls = encodeURIComponent(route.class);
      const inst = encodeURIComponent(route.instance);
      return `#/objects/${cls}/${inst}${suffix}`;
    }
    case "iov": {
      const query = new URLSearchParams({ tag: route.tag });
      if (route.t !== undefined) query.set("t", String(route.t));
      return `#/iov/${route.folder}?${query.toString()}`;
    }
  }
}
