/** Pareto helpers over stored (effort, rate) objectives, both minimized. */

export type Objectives = [number, number];

export function dominates(a: Objectives, b: Objectives): boolean {
  return a[0] <= b[0] && a[1] <= b[1] && (a[0] < b[0] || a[1] < b[1]);
}

/**
 * Flag the nondominated members of a point set. Null entries (baselines
 * carry no search objectives) are never part of the front but keep their
 * slot so indices line up with the caller's candidate list.
 */
export function paretoFlags(points: (Objectives | null)[]): boolean[] {
  return points.map((p, i) => {
    if (!p) return false;
    for (let j = 0; j < points.length; j++) {
      const q = points[j];
      if (j !== i && q && dominates(q, p)) return false;
    }
    return true;
  });
}
