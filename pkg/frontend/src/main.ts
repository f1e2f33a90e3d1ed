import { ApiClient, ApiError } from "./api.js";
import { diffParams } from "./diff.js";
import { renderDiff, renderObjectTable, renderScope, renderTimeline } from "./render.js";
import { DEFAULT_ROUTE, formatHash, parseHash, type Route } from "./state.js";

const api = new ApiClient();

function goto(route: Route): void {
  window.location.hash = formatHash(route);
}

function showError(container: Element, err: unknown): void {
  const box = container.ownerDocument.createElement("div");
  box.className = "error";
  box.textContent =
    err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
  container.appendChild(box);
}

async function showScopes(container: Element, path: string): Promise<void> {
  const scope = await api.scope(path);
  renderScope(container, scope, {
    onScope: (child) => goto({ view: "scopes", path: child }),
    onCollection: (cls, instance) =>
      goto({ view: "objects", class: cls, instance }),
  });
}

async function showObject(
  container: Element,
  route: Extract<Route, { view: "objects" }>,
): Promise<void> {
  const obj = await api.object(route.class, route.instance, route.v);
  if (route.diff === undefined) {
    renderObjectTable(container, obj);
    return;
  }
  const base = await api.object(route.class, route.instance, route.diff);
  renderDiff(container, base, obj, diffParams(base.params, obj.params));
}

async function showIov(
  container: Element,
  route: Extract<Route, { view: "iov" }>,
): Promise<void> {
  const listing = await api.entries(route.folder, route.tag);
  let resolved = null;
  if (route.t !== undefined) {
    try {
      resolved = await api.resolve(route.folder, route.tag, route.t);
    } catch (err) {
      if (!(err instanceof ApiError) || err.code !== "NoValidEntry") throw err;
    }
  }
  renderTimeline(container, listing.entries, route.t, resolved);
}

async function dispatch(container: Element): Promise<void> {
  const route = parseHash(window.location.hash);
  container.textContent = "loading...";
  try {
    if (route.view === "scopes") await showScopes(container, route.path);
    else if (route.view === "objects") await showObject(container, route);
    else await showIov(container, route);
  } catch (err) {
    container.textContent = "";
    showError(container, err);
  }
}

export function start(): void {
  const container = document.getElementById("app");
  if (container === null) throw new Error("missing #app element");
  if (window.location.hash === "") window.location.hash = formatHash(DEFAULT_ROUTE);
  window.addEventListener("hashchange", () => void dispatch(container));
  void dispatch(container);
}

start();
