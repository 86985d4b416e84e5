/**
 * DOM wiring for the explorer page. All logic lives in the pure modules;
 * this file only routes events into state updates and re-renders.
 */

import { BundleError, METRIC_LABELS, METRIC_NAMES, parseBundle } from './types.js';
import {
  ExplorerState,
  effectiveDirections,
  initialState,
  reset,
  withBundle,
  withDirectionToggled,
  withSelectionToggled,
  withWeight,
} from './state.js';
import {
  compareView,
  costStrips,
  paretoView,
  rankingView,
  renderParetoSvg,
  renderRadarSvg,
  renderRankingHtml,
  renderStripsSvg,
} from './views.js';

let state: ExplorerState = initialState();
let error = '';

function dispatch(next: ExplorerState): void {
  state = next;
  error = '';
  render();
}

function byId(id: string): HTMLElement {
  return document.getElementById(id)!;
}

async function onFileChosen(input: HTMLInputElement): Promise<void> {
  const file = input.files?.[0];
  if (!file) return;
  try {
    const text = await file.text();
    dispatch(withBundle(state, parseBundle(text)));
  } catch (e) {
    error = e instanceof BundleError ? e.message : `could not read file: ${e}`;
    render();
  }
}

function renderWeights(): void {
  const host = byId('weights');
  host.innerHTML = '';
  const dirs = effectiveDirections(state);
  METRIC_NAMES.forEach((name, j) => {
    const row = document.createElement('div');
    row.className = 'weight-row';

    const label = document.createElement('span');
    label.className = 'weight-label';
    label.textContent = METRIC_LABELS[name];

    const slider = document.createElement('input');
    slider.type = 'range';
    slider.min = '0';
    slider.max = '1';
    slider.step = '0.001';
    slider.value = String(state.weights[j]);
    slider.addEventListener('input', () => {
      dispatch(withWeight(state, j, Number(slider.value)));
    });

    const value = document.createElement('span');
    value.className = 'weight-value';
    value.textContent = state.weights[j].toFixed(3);

    const dir = document.createElement('button');
    dir.className = 'dir-toggle';
    dir.title = 'flip the preferred direction of this metric';
    dir.textContent = dirs[j] ? 'high = good' : 'low = good';
    dir.addEventListener('click', () => {
      dispatch(withDirectionToggled(state, name));
    });

    row.append(label, slider, value, dir);
    host.appendChild(row);
  });
}

function hookSelection(host: HTMLElement): void {
  host.querySelectorAll<HTMLElement>('[data-id]').forEach(el => {
    el.addEventListener('click', () => {
      const id = el.getAttribute('data-id');
      if (id) dispatch(withSelectionToggled(state, id));
    });
  });
}

function render(): void {
  const banner = byId('error');
  banner.textContent = error;
  banner.style.display = error ? 'block' : 'none';

  const prov = state.bundle?.provenance ?? null;
  byId('bundle-info').textContent = state.bundle
    ? `${state.bundle.candidates.length} candidates loaded`
      + (prov && 'merged_from' in prov ? ' (merged pools)' : '')
    : 'no bundle loaded';

  renderWeights();

  const scatterHost = byId('scatter');
  scatterHost.innerHTML = renderParetoSvg(paretoView(state));
  hookSelection(scatterHost);

  const ranking = rankingView(state);
  const tableHost = byId('ranking');
  tableHost.innerHTML = renderRankingHtml(ranking, state.selected);
  hookSelection(tableHost);

  byId('strips').innerHTML = ranking ? renderStripsSvg(costStrips(ranking.rows)) : '';

  const cmp = compareView(state);
  byId('radar').innerHTML = renderRadarSvg(cmp);
  byId('radar-legend').innerHTML = cmp.ready
    ? cmp.ids!
        .map((id, k) => `<span class="legend-swatch swatch-${k}"></span>${id}`)
        .map(s => `<span class="legend-item">${s}</span>`)
        .join(' ')
    : '';
}

function init(): void {
  const input = byId('bundle-file') as HTMLInputElement;
  input.addEventListener('change', () => { void onFileChosen(input); });
  byId('reset').addEventListener('click', () => dispatch(reset(state)));
  render();
}

init();
