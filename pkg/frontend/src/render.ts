import type { DiffRow } from "./diff.js";
import type { Segment } from "./timeline.js";
import type { IovEntry, IovResolve, Param, Scope, StoredObject } from "./types.js";
import { formatInterval, layoutTimeline, timelineSpan, toFraction } from "./timeline.js";

function el<K extends keyof HTMLElementTagNameMap>(
  container: Element,
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = container.ownerDocument.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function clear(container: Element): void {
  while (container.firstChild) container.removeChild(container.firstChild);
}

const PARAM_COLUMNS = ["Name", "Type", "Value", "Unit", "Comment"] as const;

function paramCells(param: Param): string[] {
  return [param.name, param.type, param.value, param.unit ?? "", param.comment];
}

/** The parameter table of one object version: one row per field, the five
 * dictionary columns always present. */
export function renderObjectTable(container: Element, obj: StoredObject): void {
  clear(container);
  const caption = el(
    container,
    "div",
    "object-head",
    `${obj.class}/${obj.instance} @ ${obj.scope} ` +
      `(dict v${obj.dict_version}, object v${obj.object_version})`,
  );
  container.appendChild(caption);

  const table = el(container, "table", "params");
  const thead = el(container, "thead");
  const headRow = el(container, "tr");
  for (const column of PARAM_COLUMNS) {
    headRow.appendChild(el(container, "th", undefined, column));
  }
  thead.appendChild(headRow);
  table.appendChild(thead);

  const tbody = el(container, "tbody");
  for (const param of obj.params) {
    const row = el(container, "tr", "param");
    row.dataset.name = param.name;
    for (const cell of paramCells(param)) {
      row.appendChild(el(container, "td", undefined, cell));
    }
    tbody.appendChild(row);
  }
  table.appendChild(tbody);
  container.appendChild(table);
}

export interface ScopeHandlers {
  onScope: (path: string) => void;
  onCollection: (className: string, instance: string) => void;
}

/** One level of the scope tree: child scopes as links, then the parameter
 * collections located at this scope. */
export function renderScope(
  container: Element,
  scope: Scope,
  handlers: ScopeHandlers,
): void {
  clear(container);
  container.appendChild(el(container, "h2", "scope-path", scope.path));

  const childList = el(container, "ul", "scope-children");
  for (const child of scope.children) {
    const item = el(container, "li");
    const link = el(container, "a", "scope-link", child);
    link.href = "#";
    link.addEventListener("click", (event) => {
      event.preventDefault();
      handlers.onScope(child);
    });
    item.appendChild(link);
    childList.appendChild(item);
  }
  container.appendChild(childList);

  const colList = el(container, "ul", "scope-collections");
  for (const key of scope.collections) {
    const item = el(container, "li");
    const link = el(container, "a", "collection-link", `${key.class}/${key.instance}`);
    link.href = "#";
    link.dataset.class = key.class;
    link.dataset.instance = key.instance;
    link.addEventListener("click", (event) => {
      event.preventDefault();
      handlers.onCollection(key.class, key.instance);
    });
    item.appendChild(link);
    colList.appendChild(item);
  }
  container.appendChild(colList);
}

/** Side-by-side field diff; each row carries its change kind as a CSS class
 * and a data-kind attribute. */
export function renderDiff(
  container: Element,
  before: StoredObject,
  after: StoredObject,
  rows: DiffRow[],
): void {
  clear(container);
  container.appendChild(
    el(
      container,
      "div",
      "diff-head",
      `${after.class}/${after.instance}: v${before.object_version} -> v${after.object_version}`,
    ),
  );
  const table = el(container, "table", "diff");
  const thead = el(container, "thead");
  const headRow = el(container, "tr");
  for (const column of ["Name", `v${before.object_version}`, `v${after.object_version}`]) {
    headRow.appendChild(el(container, "th", undefined, column));
  }
  thead.appendChild(headRow);
  table.appendChild(thead);

  const tbody = el(container, "tbody");
  for (const row of rows) {
    const tr = el(container, "tr", `diff-row ${row.kind}`);
    tr.dataset.name = row.name;
    tr.dataset.kind = row.kind;
    tr.appendChild(el(container, "td", undefined, row.name));
    tr.appendChild(el(container, "td", undefined, row.before?.value ?? ""));
    tr.appendChild(el(container, "td", undefined, row.after?.value ?? ""));
    tbody.appendChild(tr);
  }
  table.appendChild(tbody);
  container.appendChild(table);
}

/** Horizontal interval bar plus an optional probe marker and its resolved
 * entry. Segment geometry comes from layoutTimeline; this only paints. */
export function renderTimeline(
  container: Element,
  entries: IovEntry[],
  probeT?: number,
  resolved?: IovResolve | null,
): void {
  clear(container);
  const bar = el(container, "div", "timeline");
  const segments: Segment[] = layoutTimeline(entries);
  for (const segment of segments) {
    const piece = el(container, "div", "segment", segment.entry.payload);
    if (segment.openEnded) piece.className += " open-ended";
    piece.dataset.since = String(segment.entry.since);
    piece.dataset.until =
      segment.entry.until === null ? "" : String(segment.entry.until);
    piece.title = `${formatInterval(segment.entry)} ${segment.entry.payload}`;
    piece.style.left = `${(segment.start * 100).toFixed(3)}%`;
    piece.style.width = `${((segment.end - segment.start) * 100).toFixed(3)}%`;
    bar.appendChild(piece);
  }
  if (probeT !== undefined) {
    const marker = el(container, "div", "probe-marker");
    marker.style.left = `${(toFraction(probeT, timelineSpan(entries)) * 100).toFixed(3)}%`;
    marker.title = `t=${probeT}`;
    bar.appendChild(marker);
  }
  container.appendChild(bar);

  if (probeT !== undefined) {
    const text =
      resolved == null
        ? `t=${probeT}: no valid entry`
        : `t=${probeT}: ${resolved.payload} ${formatInterval(resolved)}`;
    const result = el(container, "div", "probe-result", text);
    result.dataset.payload = resolved?.payload ?? "";
    container.appendChild(result);
  }
}
