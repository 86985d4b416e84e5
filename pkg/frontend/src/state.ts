/**
 * Explorer state: one loaded bundle plus the designer's weight sliders,
 * direction overrides, and candidate selection. Updates are pure functions
 * returning a fresh state; the bundle object itself is never touched, so
 * everything derived from it is resettable.
 */

import { METRIC_NAMES, MetricName, ResultBundle } from './types.js';
import { DEFAULT_HIGHER_BETTER, uniformWeights } from './ranking.js';

export const MAX_SELECTED = 2;

export interface ExplorerState {
  bundle: ResultBundle | null;
  /** Always 7 non-negative entries summing to 1 (within float dust). */
  weights: number[];
  overrides: Partial<Record<MetricName, boolean>>;
  /** Up to MAX_SELECTED candidate ids, oldest first. */
  selected: string[];
}

export function initialState(): ExplorerState {
  return { bundle: null, weights: uniformWeights(), overrides: {}, selected: [] };
}

export function withBundle(state: ExplorerState, bundle: ResultBundle): ExplorerState {
  const ids = new Set(bundle.candidates.map(c => c.id));
  return { ...state, bundle, selected: state.selected.filter(id => ids.has(id)) };
}

/**
 * Move one slider. The other weights scale proportionally so the total
 * stays exactly 1; if they were all zero the remainder spreads evenly.
 */
export function withWeight(state: ExplorerState, index: number, value: number): ExplorerState {
  const v = Math.min(1, Math.max(0, value));
  const others = state.weights.reduce((s, w, i) => (i === index ? s : s + w), 0);
  const next = state.weights.map((w, i) => {
    if (i === index) return v;
    return others > 0 ? (w * (1 - v)) / others : (1 - v) / (METRIC_NAMES.length - 1);
  });
  const total = next.reduce((s, w) => s + w, 0);
  const weights = total > 0 ? next.map(w => w / total) : uniformWeights();
  return { ...state, weights };
}

export function effectiveDirections(state: ExplorerState): boolean[] {
  return METRIC_NAMES.map(name =>
    state.overrides[name]
    ?? state.bundle?.directions[name]
    ?? DEFAULT_HIGHER_BETTER[name]);
}

/** Flip one metric's preferred direction; flipping back clears the override. */
export function withDirectionToggled(state: ExplorerState, name: MetricName): ExplorerState {
  const base = state.bundle?.directions[name] ?? DEFAULT_HIGHER_BETTER[name];
  const next = !(state.overrides[name] ?? base);
  const overrides = { ...state.overrides };
  if (next === base) {
    delete overrides[name];
  } else {
    overrides[name] = next;
  }
  return { ...state, overrides };
}

/**
 * Toggle a candidate in the comparison selection. A third pick replaces the
 * oldest so the pair invariant never breaks.
 */
export function withSelectionToggled(state: ExplorerState, id: string): ExplorerState {
  if (state.bundle && !state.bundle.candidates.some(c => c.id === id)) return state;
  let selected: string[];
  if (state.selected.includes(id)) {
    selected = state.selected.filter(s => s !== id);
  } else {
    selected = [...state.selected, id];
    while (selected.length > MAX_SELECTED) selected.shift();
  }
  return { ...state, selected };
}

/** Back to uniform weights, stock directions, empty selection. */
export function reset(state: ExplorerState): ExplorerState {
  return { ...initialState(), bundle: state.bundle };
}
