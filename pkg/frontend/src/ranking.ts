/**
 * Client-side twin of the CLI ranking.
 *
 * Each metric is min-max normalized over the whole pool with 0 at the
 * preferred end, then candidates are scored by the weighted sum and sorted
 * ascending (ties broken by id). The golden fixtures pin this to the Python
 * implementation at 1e-12 on xi, so keep the arithmetic shape identical:
 *
 *   higher-better:  m~ = (max - m) / (max - min)
 *   lower-better:   m~ = (m - min) / (max - min)
 */

import { BundleCandidate, METRIC_NAMES, MetricName } from './types.js';

export const WEIGHT_SUM_TOL = 1e-9;

export const DEFAULT_HIGHER_BETTER: Record<MetricName, boolean> = {
  speed: true,
  torque: true,
  backdriving_torque: false,
  manipulability: false,
  compactness: false,
  actuation_mass: false,
  com_height: true,
};

export class BadWeights extends Error {}

export function uniformWeights(): number[] {
  return METRIC_NAMES.map(() => 1 / METRIC_NAMES.length);
}

export function validateWeights(weights: number[]): void {
  if (weights.length !== METRIC_NAMES.length) {
    throw new BadWeights(`expected ${METRIC_NAMES.length} weights, got ${weights.length}`);
  }
  for (const w of weights) {
    if (!Number.isFinite(w) || w < 0) {
      throw new BadWeights('weights must be finite and non-negative');
    }
  }
  const total = weights.reduce((s, w) => s + w, 0);
  if (Math.abs(total - 1) > WEIGHT_SUM_TOL) {
    throw new BadWeights(`weights must sum to 1 (got ${total})`);
  }
}

/** Per-metric min-max over the pool, 0 = best; degenerate columns map to 0. */
export function normalizePool(raw: number[][], higherBetter: boolean[]): number[][] {
  const out = raw.map(() => METRIC_NAMES.map(() => 0));
  for (let j = 0; j < METRIC_NAMES.length; j++) {
    let lo = Infinity;
    let hi = -Infinity;
    for (const row of raw) {
      if (row[j] < lo) lo = row[j];
      if (row[j] > hi) hi = row[j];
    }
    const span = hi - lo;
    if (span <= 0) continue;
    for (let i = 0; i < raw.length; i++) {
      out[i][j] = higherBetter[j] ? (hi - raw[i][j]) / span : (raw[i][j] - lo) / span;
    }
  }
  return out;
}

export function cost(normalized: number[], weights: number[]): number {
  let xi = 0;
  for (let j = 0; j < weights.length; j++) xi += weights[j] * normalized[j];
  return xi;
}

export interface RankedRow {
  rank: number;
  id: string;
  arch: string;
  actuator: string;
  isBaseline: boolean;
  raw: number[];
  normalized: number[];
  xi: number;
}

export function rankCandidates(
  candidates: BundleCandidate[],
  weights: number[],
  higherBetter: boolean[],
): RankedRow[] {
  if (candidates.length === 0) throw new Error('cannot rank an empty population');
  validateWeights(weights);
  const raw = candidates.map(c => METRIC_NAMES.map(name => c.metrics[name]));
  const normed = normalizePool(raw, higherBetter);
  const rows: RankedRow[] = candidates.map((c, i) => ({
    rank: 0,
    id: c.id,
    arch: c.arch,
    actuator: c.actuator,
    isBaseline: c.is_baseline,
    raw: raw[i],
    normalized: normed[i],
    xi: cost(normed[i], weights),
  }));
  rows.sort((a, b) => a.xi - b.xi || (a.id < b.id ? -1 : a.id > b.id ? 1 : 0));
  rows.forEach((r, i) => { r.rank = i + 1; });
  return rows;
}
