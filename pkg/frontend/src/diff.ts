import type { Param } from "./types.js";

export type DiffKind = "unchanged" | "changed" | "added" | "removed";

export interface DiffRow {
  name: string;
  kind: DiffKind;
  before: Param | null;
  after: Param | null;
}

function sameParam(a: Param, b: Param): boolean {
  return (
    a.type === b.type &&
    a.value === b.value &&
    a.unit === b.unit &&
    a.comment === b.comment
  );
}

/** Field-by-field comparison of two parameter lists, matched by name.
 * Survivors and additions come out in the after-side order; removals are
 * appended in their before-side order. */
export function diffParams(before: Param[], after: Param[]): DiffRow[] {
  const old = new Map(before.map((p) => [p.name, p]));
  const rows: DiffRow[] = [];
  for (const param of after) {
    const prev = old.get(param.name);
    if (prev === undefined) {
      rows.push({ name: param.name, kind: "added", before: null, after: param });
    } else {
      rows.push({
        name: param.name,
        kind: sameParam(prev, param) ? "unchanged" : "changed",
        before: prev,
        after: param,
      });
    }
  }
  const kept = new Set(after.map((p) => p.name));
  for (const param of before) {
    if (!kept.has(param.name)) {
      rows.push({ name: param.name, kind: "removed", before: param, after: null });
    }
  }
  return rows;
}

/** Names of the fields that differ in any way between the two versions. */
export function changedNames(rows: DiffRow[]): string[] {
  return rows.filter((r) => r.kind !== "unchanged").map((r) => r.name);
}
