import type { IovEntry } from "./types.js";

/** One drawable interval; start/end are fractions of the drawing width. */
export interface Segment {
  entry: IovEntry;
  start: number;
  end: number;
  openEnded: boolean;
}

/** The entry whose half-open interval [since, until) contains t, or null.
 * A null until means the entry is open-ended. Entries arrive sorted by
 * since and disjoint, as the API guarantees. */
export function probeEntries(entries: IovEntry[], t: number): IovEntry | null {
  for (const entry of entries) {
    if (entry.since <= t && (entry.until === null || t < entry.until)) {
      return entry;
    }
  }
  return null;
}

/** The time span a timeline drawing should cover: the closed range of all
 * finite endpoints, padded by a tail for the open-ended entry. */
export function timelineSpan(entries: IovEntry[]): { t0: number; t1: number } {
  if (entries.length === 0) return { t0: 0, t1: 1 };
  const first = entries[0]!;
  const last = entries[entries.length - 1]!;
  const t0 = first.since;
  let t1 = last.until === null ? last.since : last.until;
  if (t1 <= t0) t1 = t0 + 1;
  if (last.until === null) t1 += (t1 - t0) * 0.15 || 1;
  return { t0, t1 };
}

export function toFraction(t: number, span: { t0: number; t1: number }): number {
  const f = (t - span.t0) / (span.t1 - span.t0);
  return Math.min(1, Math.max(0, f));
}

export function layoutTimeline(entries: IovEntry[]): Segment[] {
  const span = timelineSpan(entries);
  return entries.map((entry) => ({
    entry,
    start: toFraction(entry.since, span),
    end: entry.until === null ? 1 : toFraction(entry.until, span),
    openEnded: entry.until === null,
  }));
}

export function formatInterval(entry: IovEntry): string {
  const until = entry.until === null ? "inf" : String(entry.until);
  return `[${entry.since}, ${until})`;
}
