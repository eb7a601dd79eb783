/** Deterministic word-cloud layout: a frequency-scaled type list.
 *
 * Concept members are occurrences; the cloud shows each distinct
 * surface type once, ordered by descending member count (ties broken
 * alphabetically), with font size scaled linearly between the least
 * and most frequent type. No randomness, so renders are reproducible.
 */

import { ConceptMember } from "./types.js";

export interface CloudEntry {
  type: string;
  count: number;
  /** Font size in em, in [MIN_EM, MAX_EM]. */
  em: number;
}

const MIN_EM = 0.85;
const MAX_EM = 1.7;

export function cloudEntries(members: Pick<ConceptMember, "surface">[]): CloudEntry[] {
  const counts = new Map<string, number>();
  for (const m of members) {
    counts.set(m.surface, (counts.get(m.surface) ?? 0) + 1);
  }
  const types = [...counts.entries()].sort(
    (a, b) => b[1] - a[1] || a[0].localeCompare(b[0]),
  );
  if (types.length === 0) return [];
  const most = types[0][1];
  const least = types[types.length - 1][1];
  const span = most - least;
  return types.map(([type, count]) => ({
    type,
    count,
    em: span === 0 ? (MIN_EM + MAX_EM) / 2 : MIN_EM + ((count - least) / span) * (MAX_EM - MIN_EM),
  }));
}
