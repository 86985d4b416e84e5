/**
 * Result bundle schema (version 1) as written by the ankleopt CLI.
 *
 * The explorer is a pure view over one of these files: it never mutates a
 * loaded bundle and recomputes every ranking from the stored raw metrics.
 */

export const SCHEMA_VERSION = 1;

export const METRIC_NAMES = [
  'speed',
  'torque',
  'backdriving_torque',
  'manipulability',
  'compactness',
  'actuation_mass',
  'com_height',
] as const;

export type MetricName = (typeof METRIC_NAMES)[number];

export const METRIC_LABELS: Record<MetricName, string> = {
  speed: 'speed',
  torque: 'torque',
  backdriving_torque: 'backdrive effort',
  manipulability: 'anisotropy',
  compactness: 'footprint radius',
  actuation_mass: 'actuation mass',
  com_height: 'CoM height',
};

export interface BundleCandidate {
  id: string;
  arch: string;
  actuator: string;
  genes: number[];
  /** (peak effort, peak rate) from the search; null for injected baselines. */
  objectives: [number, number] | null;
  metrics: Record<MetricName, number>;
  /** Variance of the region-aggregated metrics only. */
  metric_vars: Record<string, number>;
  singular_poses: number;
  is_baseline: boolean;
}

export interface RegionWindow {
  roll_deg: [number, number];
  pitch_deg: [number, number];
  grid_step_deg: number;
}

export interface ResultBundle {
  schema_version: number;
  metric_names: string[];
  directions: Record<MetricName, boolean>;
  region: { core: RegionWindow; operational: RegionWindow };
  provenance: Record<string, unknown>;
  candidates: BundleCandidate[];
  pool_sha256: string;
}

export class BundleError extends Error {}

function fail(msg: string): never {
  throw new BundleError(msg);
}

function checkNumber(value: unknown, where: string): number {
  if (typeof value !== 'number' || !Number.isFinite(value)) {
    fail(`${where}: not a finite number`);
  }
  return value;
}

function checkString(value: unknown, where: string): string {
  if (typeof value !== 'string' || value.length === 0) {
    fail(`${where}: not a non-empty string`);
  }
  return value;
}

function checkCandidate(raw: unknown, where: string): BundleCandidate {
  if (typeof raw !== 'object' || raw === null || Array.isArray(raw)) {
    fail(`${where}: not an object`);
  }
  const c = raw as Record<string, unknown>;
  const metricsRaw = c.metrics;
  if (typeof metricsRaw !== 'object' || metricsRaw === null) {
    fail(`${where}.metrics: missing`);
  }
  const metrics = {} as Record<MetricName, number>;
  for (const name of METRIC_NAMES) {
    metrics[name] = checkNumber(
      (metricsRaw as Record<string, unknown>)[name], `${where}.metrics.${name}`);
  }
  let objectives: [number, number] | null = null;
  if (c.objectives !== null && c.objectives !== undefined) {
    if (!Array.isArray(c.objectives) || c.objectives.length !== 2) {
      fail(`${where}.objectives: expected null or a pair`);
    }
    objectives = [
      checkNumber(c.objectives[0], `${where}.objectives[0]`),
      checkNumber(c.objectives[1], `${where}.objectives[1]`),
    ];
  }
  const varsRaw = (c.metric_vars ?? {}) as Record<string, unknown>;
  const metric_vars: Record<string, number> = {};
  for (const [key, value] of Object.entries(varsRaw)) {
    metric_vars[key] = checkNumber(value, `${where}.metric_vars.${key}`);
  }
  return {
    id: checkString(c.id, `${where}.id`),
    arch: checkString(c.arch, `${where}.arch`),
    actuator: checkString(c.actuator, `${where}.actuator`),
    genes: Array.isArray(c.genes) ? c.genes.map((g, i) => checkNumber(g, `${where}.genes[${i}]`)) : [],
    objectives,
    metrics,
    metric_vars,
    singular_poses: typeof c.singular_poses === 'number' ? c.singular_poses : 0,
    is_baseline: c.is_baseline === true,
  };
}

/**
 * Parse and validate a bundle file. Throws BundleError with the offending
 * field path on any structural problem; version pinning happens here so a
 * future schema never renders half-garbled.
 */
export function parseBundle(text: string): ResultBundle {
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch (e) {
    fail(`not valid JSON: ${(e as Error).message}`);
  }
  if (typeof doc !== 'object' || doc === null || Array.isArray(doc)) {
    fail('top level: not an object');
  }
  const d = doc as Record<string, unknown>;
  if (d.schema_version !== SCHEMA_VERSION) {
    fail(`unsupported schema version ${JSON.stringify(d.schema_version)} (expected ${SCHEMA_VERSION})`);
  }
  const names = d.metric_names;
  if (!Array.isArray(names)
      || names.length !== METRIC_NAMES.length
      || names.some((n, i) => n !== METRIC_NAMES[i])) {
    fail(`metric_names: expected [${METRIC_NAMES.join(', ')}]`);
  }
  const dirsRaw = d.directions;
  if (typeof dirsRaw !== 'object' || dirsRaw === null) {
    fail('directions: missing');
  }
  const directions = {} as Record<MetricName, boolean>;
  for (const name of METRIC_NAMES) {
    const v = (dirsRaw as Record<string, unknown>)[name];
    if (typeof v !== 'boolean') fail(`directions.${name}: not a boolean`);
    directions[name] = v;
  }
  if (!Array.isArray(d.candidates)) {
    fail('candidates: not an array');
  }
  const candidates = d.candidates.map((c, i) => checkCandidate(c, `candidates[${i}]`));
  const seen = new Set<string>();
  for (const c of candidates) {
    if (seen.has(c.id)) fail(`duplicate candidate id ${c.id}`);
    seen.add(c.id);
  }
  const region = d.region as ResultBundle['region'];
  if (typeof region !== 'object' || region === null || !region.core || !region.operational) {
    fail('region: expected core and operational windows');
  }
  return {
    schema_version: SCHEMA_VERSION,
    metric_names: names as string[],
    directions,
    region,
    provenance: (d.provenance ?? {}) as Record<string, unknown>,
    candidates,
    pool_sha256: typeof d.pool_sha256 === 'string' ? d.pool_sha256 : '',
  };
}
