import { BundleCandidate, METRIC_NAMES, MetricName, ResultBundle } from '../src/types.js';
import { DEFAULT_HIGHER_BETTER } from '../src/ranking.js';

/** Candidate with metrics given positionally in METRIC_NAMES order. */
export function candidate(
  id: string,
  metrics: number[],
  extra: Partial<BundleCandidate> = {},
): BundleCandidate {
  const named = {} as Record<MetricName, number>;
  METRIC_NAMES.forEach((name, j) => { named[name] = metrics[j]; });
  return {
    id,
    arch: 'rsu',
    actuator: 'rot-harmonic-90',
    genes: [],
    objectives: null,
    metrics: named,
    metric_vars: {},
    singular_poses: 0,
    is_baseline: false,
    ...extra,
  };
}

export function bundleOf(candidates: BundleCandidate[]): ResultBundle {
  return {
    schema_version: 1,
    metric_names: [...METRIC_NAMES],
    directions: { ...DEFAULT_HIGHER_BETTER },
    region: {
      core: { roll_deg: [-17.5, 17.5], pitch_deg: [-60, 20], grid_step_deg: 2 },
      operational: { roll_deg: [-35, 35], pitch_deg: [-70, 30], grid_step_deg: 2 },
    },
    provenance: {},
    candidates,
    pool_sha256: '',
  };
}

/** Seven increasing metric values, handy when only relative order matters. */
export function seqMetrics(base: number): number[] {
  return METRIC_NAMES.map((_, j) => base + j);
}
