/**
 * View models and their SVG/HTML renderers.
 *
 * Everything here is a pure function of the explorer state: the models are
 * plain data (asserted directly in tests), the renderers build markup
 * strings that main.ts injects. No DOM access, no mutation of the bundle.
 */

import {
  BundleCandidate,
  METRIC_LABELS,
  METRIC_NAMES,
  MetricName,
} from './types.js';
import { ExplorerState, effectiveDirections } from './state.js';
import { RankedRow, rankCandidates } from './ranking.js';
import { Objectives, paretoFlags } from './dominance.js';

export const GROUP_COLORS = ['#2f64b7', '#04b254', '#c2571a', '#8145b5', '#b01858', '#557788'];

const ARCH_UNITS: Record<string, { effort: string; rate: string }> = {
  spu: { effort: 'N', rate: 'mm/s' },
  rsu: { effort: 'Nm', rate: 'rad/s' },
};

export function groupKey(c: { arch: string; actuator: string }): string {
  return `${c.arch}/${c.actuator}`;
}

function esc(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

function fmt(v: number): string {
  if (!Number.isFinite(v)) return String(v);
  if (v === 0) return '0';
  const a = Math.abs(v);
  return a >= 1e4 || a < 1e-2 ? v.toExponential(2) : v.toPrecision(4);
}

// ---------------------------------------------------------------------------
// Pareto scatter, one panel per architecture/actuator group
// ---------------------------------------------------------------------------

export interface ParetoPoint {
  id: string;
  f1: number;
  f2: number;
  nondominated: boolean;
  selected: boolean;
  isBaseline: boolean;
  metrics: Record<MetricName, number>;
}

export interface GroupScatter {
  group: string;
  arch: string;
  actuator: string;
  effortUnit: string;
  rateUnit: string;
  points: ParetoPoint[];
}

export interface ParetoView {
  empty: boolean;
  message: string;
  groups: GroupScatter[];
}

/**
 * Candidates with stored objectives, grouped; nondominance is rechecked
 * client-side within each group (objective units differ across
 * architectures, so cross-group dominance is meaningless).
 */
export function paretoView(state: ExplorerState): ParetoView {
  const bundle = state.bundle;
  if (!bundle) {
    return { empty: true, message: 'load a result bundle to begin', groups: [] };
  }
  const plottable = bundle.candidates.filter(c => c.objectives !== null);
  if (plottable.length === 0) {
    return { empty: true, message: 'no candidates with stored objectives', groups: [] };
  }
  const byGroup = new Map<string, BundleCandidate[]>();
  for (const c of plottable) {
    const key = groupKey(c);
    const list = byGroup.get(key);
    if (list) list.push(c);
    else byGroup.set(key, [c]);
  }
  const selected = new Set(state.selected);
  const groups: GroupScatter[] = [];
  for (const [key, members] of byGroup) {
    const flags = paretoFlags(members.map(c => c.objectives));
    const units = ARCH_UNITS[members[0].arch] ?? { effort: '', rate: '' };
    const points = members.map((c, i) => ({
      id: c.id,
      f1: (c.objectives as Objectives)[0],
      f2: (c.objectives as Objectives)[1],
      nondominated: flags[i],
      selected: selected.has(c.id),
      isBaseline: c.is_baseline,
      metrics: c.metrics,
    }));
    points.sort((a, b) => a.f1 - b.f1);
    groups.push({
      group: key,
      arch: members[0].arch,
      actuator: members[0].actuator,
      effortUnit: units.effort,
      rateUnit: units.rate,
      points,
    });
  }
  groups.sort((a, b) => (a.group < b.group ? -1 : a.group > b.group ? 1 : 0));
  return { empty: false, message: '', groups };
}

function axisRange(values: number[]): [number, number] {
  let lo = Math.min(...values);
  let hi = Math.max(...values);
  if (hi - lo <= 0) {
    const pad = Math.max(1, Math.abs(lo) * 0.1);
    lo -= pad;
    hi += pad;
  } else {
    const pad = (hi - lo) * 0.08;
    lo -= pad;
    hi += pad;
  }
  return [lo, hi];
}

export function renderParetoSvg(view: ParetoView, panelW = 300, panelH = 240): string {
  if (view.empty) {
    return `<svg width="420" height="120" role="img"><text x="210" y="64" text-anchor="middle" class="empty-note">${esc(view.message)}</text></svg>`;
  }
  const margin = { left: 54, right: 12, top: 26, bottom: 36 };
  const width = view.groups.length * panelW;
  const parts: string[] = [
    `<svg width="${width}" height="${panelH}" viewBox="0 0 ${width} ${panelH}">`,
  ];
  view.groups.forEach((g, gi) => {
    const color = GROUP_COLORS[gi % GROUP_COLORS.length];
    const x0 = gi * panelW;
    const innerW = panelW - margin.left - margin.right;
    const innerH = panelH - margin.top - margin.bottom;
    const [f1lo, f1hi] = axisRange(g.points.map(p => p.f1));
    const [f2lo, f2hi] = axisRange(g.points.map(p => p.f2));
    const px = (f1: number) => x0 + margin.left + ((f1 - f1lo) / (f1hi - f1lo)) * innerW;
    const py = (f2: number) => margin.top + (1 - (f2 - f2lo) / (f2hi - f2lo)) * innerH;
    parts.push(`<g class="panel" data-group="${esc(g.group)}">`);
    parts.push(`<text x="${x0 + margin.left}" y="16" class="panel-title" fill="${color}">${esc(g.group)}</text>`);
    parts.push(`<rect x="${x0 + margin.left}" y="${margin.top}" width="${innerW}" height="${innerH}" class="panel-frame"/>`);
    parts.push(`<text x="${x0 + margin.left + innerW / 2}" y="${panelH - 8}" text-anchor="middle" class="axis-label">peak effort [${esc(g.effortUnit)}]</text>`);
    parts.push(`<text x="${x0 + 14}" y="${margin.top + innerH / 2}" text-anchor="middle" class="axis-label" transform="rotate(-90 ${x0 + 14} ${margin.top + innerH / 2})">peak rate [${esc(g.rateUnit)}]</text>`);
    parts.push(`<text x="${x0 + margin.left - 4}" y="${panelH - margin.bottom + 14}" text-anchor="start" class="tick">${fmt(f1lo)}</text>`);
    parts.push(`<text x="${x0 + margin.left + innerW}" y="${panelH - margin.bottom + 14}" text-anchor="end" class="tick">${fmt(f1hi)}</text>`);
    parts.push(`<text x="${x0 + margin.left - 6}" y="${margin.top + 10}" text-anchor="end" class="tick">${fmt(f2hi)}</text>`);
    parts.push(`<text x="${x0 + margin.left - 6}" y="${margin.top + innerH}" text-anchor="end" class="tick">${fmt(f2lo)}</text>`);
    const front = g.points.filter(p => p.nondominated);
    if (front.length > 1) {
      const path = front.map(p => `${px(p.f1).toFixed(1)},${py(p.f2).toFixed(1)}`).join(' ');
      parts.push(`<polyline points="${path}" fill="none" stroke="${color}" stroke-opacity="0.35" stroke-width="1.5"/>`);
    }
    for (const p of g.points) {
      const cx = px(p.f1).toFixed(1);
      const cy = py(p.f2).toFixed(1);
      const hover = [`${p.id}`, `effort ${fmt(p.f1)} ${g.effortUnit}, rate ${fmt(p.f2)} ${g.rateUnit}`]
        .concat(METRIC_NAMES.map(m => `${METRIC_LABELS[m]}: ${fmt(p.metrics[m])}`))
        .join('\n');
      if (p.selected) {
        parts.push(`<circle cx="${cx}" cy="${cy}" r="8" class="selection-ring"/>`);
      }
      const fill = p.nondominated ? color : 'none';
      parts.push(
        `<circle cx="${cx}" cy="${cy}" r="4.5" fill="${fill}" stroke="${color}" `
        + `stroke-width="1.5" class="pareto-point" data-id="${esc(p.id)}">`
        + `<title>${esc(hover)}</title></circle>`,
      );
    }
    parts.push('</g>');
  });
  parts.push('</svg>');
  return parts.join('');
}

// ---------------------------------------------------------------------------
// Ranking table and cost distribution strips
// ---------------------------------------------------------------------------

export interface RankingView {
  rows: RankedRow[];
}

export function rankingView(state: ExplorerState): RankingView | null {
  const bundle = state.bundle;
  if (!bundle || bundle.candidates.length === 0) return null;
  return { rows: rankCandidates(bundle.candidates, state.weights, effectiveDirections(state)) };
}

export function renderRankingHtml(view: RankingView | null, selected: string[]): string {
  if (!view) {
    return '<p class="empty-note">load a result bundle to see the ranking</p>';
  }
  const picked = new Set(selected);
  const rows = view.rows.map(r => {
    const classes = [r.isBaseline ? 'baseline-row' : '', picked.has(r.id) ? 'selected' : '']
      .filter(Boolean).join(' ');
    const badge = r.isBaseline ? ' <span class="baseline-badge">baseline</span>' : '';
    return `<tr${classes ? ` class="${classes}"` : ''} data-id="${esc(r.id)}">`
      + `<td class="num">${r.rank}</td>`
      + `<td>${esc(r.id)}${badge}</td>`
      + `<td>${esc(r.arch)}</td>`
      + `<td>${esc(r.actuator)}</td>`
      + `<td class="num">${r.xi.toFixed(6)}</td>`
      + `<td class="bar-cell"><div class="xi-bar" style="width:${(r.xi * 100).toFixed(2)}%"></div></td>`
      + '</tr>';
  });
  return '<table class="ranking"><thead><tr>'
    + '<th>#</th><th>candidate</th><th>arch</th><th>actuator</th><th>cost</th><th>cost bar</th>'
    + `</tr></thead><tbody>${rows.join('')}</tbody></table>`;
}

export interface CostStrip {
  group: string;
  /** Costs of searched candidates in this group. */
  xis: number[];
  /** Costs of injected baselines in this group, drawn as arrow markers. */
  markerXis: number[];
}

export function costStrips(rows: RankedRow[]): CostStrip[] {
  const byGroup = new Map<string, CostStrip>();
  for (const r of rows) {
    const key = groupKey({ arch: r.arch, actuator: r.actuator });
    let strip = byGroup.get(key);
    if (!strip) {
      strip = { group: key, xis: [], markerXis: [] };
      byGroup.set(key, strip);
    }
    (r.isBaseline ? strip.markerXis : strip.xis).push(r.xi);
  }
  return [...byGroup.values()].sort((a, b) => (a.group < b.group ? -1 : 1));
}

export function renderStripsSvg(strips: CostStrip[], width = 640): string {
  const rowH = 34;
  const left = 190;
  const right = 16;
  const height = strips.length * rowH + 24;
  const span = width - left - right;
  const sx = (xi: number) => left + xi * span;
  const parts = [`<svg width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`];
  strips.forEach((s, i) => {
    const cy = 14 + i * rowH + rowH / 2;
    parts.push(`<text x="${left - 8}" y="${cy + 4}" text-anchor="end" class="strip-label">${esc(s.group)}</text>`);
    parts.push(`<line x1="${left}" y1="${cy}" x2="${left + span}" y2="${cy}" class="strip-axis"/>`);
    for (const xi of s.xis) {
      parts.push(`<circle cx="${sx(xi).toFixed(1)}" cy="${cy}" r="4" class="strip-dot"><title>${fmt(xi)}</title></circle>`);
    }
    for (const xi of s.markerXis) {
      const x = sx(xi).toFixed(1);
      parts.push(`<path d="M ${x} ${cy - 2} l -5 -9 l 10 0 z" class="strip-marker"><title>baseline ${fmt(xi)}</title></path>`);
    }
  });
  const axisY = height - 8;
  parts.push(`<text x="${left}" y="${axisY}" class="tick">0</text>`);
  parts.push(`<text x="${left + span}" y="${axisY}" text-anchor="end" class="tick">1</text>`);
  parts.push(`<text x="${left + span / 2}" y="${axisY}" text-anchor="middle" class="axis-label">cost</text>`);
  parts.push('</svg>');
  return parts.join('');
}

// ---------------------------------------------------------------------------
// Two-candidate radar comparison
// ---------------------------------------------------------------------------

export interface RadarAxis {
  name: MetricName;
  label: string;
  /** Raw metric values for the two candidates. */
  raw: [number, number];
  /** Min-max normalized over the pair, 1 = preferred end; equal values sit at 0.5. */
  value: [number, number];
  /** value +- sigma/span for region-aggregated metrics, null otherwise. */
  band: [[number, number] | null, [number, number] | null];
}

export interface CompareView {
  ready: boolean;
  reason: string;
  ids: [string, string] | null;
  axes: RadarAxis[];
}

export function compareView(state: ExplorerState): CompareView {
  const blank = { ids: null, axes: [] as RadarAxis[] };
  if (!state.bundle) {
    return { ready: false, reason: 'load a result bundle first', ...blank };
  }
  if (state.selected.length !== 2) {
    return { ready: false, reason: 'select two candidates to compare', ...blank };
  }
  const pair = state.selected.map(
    id => state.bundle!.candidates.find(c => c.id === id)) as [BundleCandidate, BundleCandidate];
  if (!pair[0] || !pair[1]) {
    return { ready: false, reason: 'selection not in bundle', ...blank };
  }
  const dirs = effectiveDirections(state);
  const axes = METRIC_NAMES.map((name, j) => {
    const raw: [number, number] = [pair[0].metrics[name], pair[1].metrics[name]];
    const lo = Math.min(raw[0], raw[1]);
    const hi = Math.max(raw[0], raw[1]);
    const span = hi - lo;
    const orient = (m: number) =>
      span > 0 ? (dirs[j] ? (m - lo) / span : (hi - m) / span) : 0.5;
    const value: [number, number] = [orient(raw[0]), orient(raw[1])];
    const band = pair.map((c, k) => {
      const variance = c.metric_vars[name];
      if (variance === undefined || span <= 0) return null;
      const sigma = Math.sqrt(Math.max(variance, 0)) / span;
      return [value[k] - sigma, value[k] + sigma] as [number, number];
    }) as RadarAxis['band'];
    return { name, label: METRIC_LABELS[name], raw, value, band };
  });
  return { ready: true, reason: '', ids: [pair[0].id, pair[1].id], axes };
}

const RADAR_COLORS = ['#2f64b7', '#c2571a'];

function radarPoint(cx: number, cy: number, radius: number, k: number, v: number): string {
  const angle = -Math.PI / 2 + (2 * Math.PI * k) / METRIC_NAMES.length;
  const r = radius * Math.min(1, Math.max(0, v));
  return `${(cx + r * Math.cos(angle)).toFixed(1)},${(cy + r * Math.sin(angle)).toFixed(1)}`;
}

export function renderRadarSvg(view: CompareView, size = 360): string {
  if (!view.ready) {
    return `<svg width="${size}" height="120" role="img"><text x="${size / 2}" y="64" text-anchor="middle" class="empty-note">${esc(view.reason)}</text></svg>`;
  }
  const cx = size / 2;
  const cy = size / 2 + 6;
  const radius = size / 2 - 58;
  const parts = [`<svg width="${size}" height="${size}" viewBox="0 0 ${size} ${size}">`];
  for (const ring of [0.25, 0.5, 0.75, 1.0]) {
    const pts = METRIC_NAMES.map((_, k) => radarPoint(cx, cy, radius, k, ring)).join(' ');
    parts.push(`<polygon points="${pts}" class="radar-grid"/>`);
  }
  METRIC_NAMES.forEach((name, k) => {
    const angle = -Math.PI / 2 + (2 * Math.PI * k) / METRIC_NAMES.length;
    const ex = cx + radius * Math.cos(angle);
    const ey = cy + radius * Math.sin(angle);
    const lx = cx + (radius + 16) * Math.cos(angle);
    const ly = cy + (radius + 16) * Math.sin(angle);
    const anchor = Math.abs(Math.cos(angle)) < 0.3 ? 'middle' : Math.cos(angle) > 0 ? 'start' : 'end';
    parts.push(`<line x1="${cx}" y1="${cy}" x2="${ex.toFixed(1)}" y2="${ey.toFixed(1)}" class="radar-spoke"/>`);
    parts.push(`<text x="${lx.toFixed(1)}" y="${ly.toFixed(1)}" text-anchor="${anchor}" class="radar-label">${esc(METRIC_LABELS[name])}</text>`);
  });
  [0, 1].forEach(k => {
    const color = RADAR_COLORS[k];
    if (view.axes.some(a => a.band[k] !== null)) {
      const outerPts = view.axes.map((a, j) =>
        radarPoint(cx, cy, radius, j, a.band[k] ? a.band[k]![1] : a.value[k])).join(' ');
      const innerPts = view.axes.map((a, j) =>
        radarPoint(cx, cy, radius, j, a.band[k] ? a.band[k]![0] : a.value[k])).join(' ');
      parts.push(
        `<path d="M ${outerPts.split(' ').join(' L ')} Z M ${innerPts.split(' ').join(' L ')} Z" `
        + `fill="${color}" fill-opacity="0.14" fill-rule="evenodd" class="radar-band"/>`,
      );
    }
    const pts = view.axes.map((a, j) => radarPoint(cx, cy, radius, j, a.value[k])).join(' ');
    parts.push(`<polygon points="${pts}" fill="${color}" fill-opacity="0.10" stroke="${color}" stroke-width="2" class="radar-line"/>`);
    for (let j = 0; j < view.axes.length; j++) {
      const [x, y] = radarPoint(cx, cy, radius, j, view.axes[j].value[k]).split(',');
      const a = view.axes[j];
      parts.push(`<circle cx="${x}" cy="${y}" r="3" fill="${color}"><title>${esc(`${view.ids![k]}\n${a.label}: ${fmt(a.raw[k])}`)}</title></circle>`);
    }
  });
  parts.push('</svg>');
  return parts.join('');
}
