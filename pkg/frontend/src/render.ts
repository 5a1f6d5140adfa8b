/**
 * Pure HTML renderers for the five analysis tabs.
 *
 * Hard rule: every engine quantity is printed through num(), which emits
 * the verbatim literal from the response body. The renderer computes
 * nothing from engine numbers except presentation geometry (bar widths,
 * scatter positions), and those never become visible text.
 */

import {
  RawValue,
  bool,
  entries,
  get,
  isNull,
  items,
  raw,
  str,
  toNumber,
} from "./rawjson";

export type ResultKind = "forecast" | "analyze";

export const DIMENSIONS = [
  "coercion", "cooperation", "dependency", "information",
  "regulation", "military", "economic", "technology",
] as const;

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Verbatim engine number, wrapped for styling and testability. */
function num(value: RawValue | undefined): string {
  return `<span class="num">${escapeHtml(raw(value))}</span>`;
}

function name(text: string): string {
  return `<span class="pattern-name">${escapeHtml(text)}</span>`;
}

function emptyState(message: string): string {
  return `<p class="empty-state">${escapeHtml(message)}</p>`;
}

function result(doc: RawValue): RawValue | undefined {
  return get(doc, "result");
}

// --- candidates -------------------------------------------------------------

export function renderCandidate(cand: RawValue, z?: RawValue): string {
  const kind = str(get(cand, "kind"));
  const target = str(get(cand, "target"));
  const posterior = num(get(cand, "normalized_posterior"));
  const zPart = z !== undefined ? ` / Z=${num(z)}` : "";
  if (kind === "inverse") {
    const sourceA = str(get(cand, "source_a"));
    return `<li class="candidate inverse">` +
      `0.20 &times; &pi;(${name(sourceA)})=${num(get(cand, "pi_a"))}${zPart}` +
      ` &rarr; ${name(target)} <span class="posterior">posterior ${posterior}</span>` +
      ` <span class="badge">reversal</span></li>`;
  }
  const sourceA = str(get(cand, "source_a"));
  const sourceB = str(get(cand, "source_b"));
  const degenerate = bool(get(cand, "degenerate"))
    ? ` <span class="badge">degenerate</span>` : "";
  const consistency = get(cand, "consistency");
  const consistencyPart = consistency !== undefined && !isNull(consistency)
    ? ` <span class="consistency">consistency ${num(consistency)}</span>` : "";
  return `<li class="candidate composition">` +
    `&pi;(${name(sourceA)})=${num(get(cand, "pi_a"))} &times; ` +
    `&pi;(${name(sourceB)})=${num(get(cand, "pi_b"))} &times; ` +
    `lie_sim=${num(get(cand, "lie_sim"))} &times; ` +
    `decay=${num(get(cand, "decay_factor"))}${zPart}` +
    ` &rarr; ${name(target)} <span class="posterior">posterior ${posterior}</span>` +
    `${consistencyPart}${degenerate}</li>`;
}

// --- tab 1: conclusion --------------------------------------------------------

export function renderConclusionTab(doc: RawValue, kind: ResultKind): string {
  const res = result(doc);
  if (kind === "forecast") {
    const attractors = items(get(res, "attractors")).map((entry) =>
      `<li>${name(str(get(entry, "pattern")))} ` +
      `<span class="posterior">${num(get(entry, "posterior"))}</span></li>`).join("");
    const secondary = get(res, "secondary");
    return `<div class="conclusion">` +
      `<p>Primary attractor: ${name(str(get(res, "primary")))}</p>` +
      `<p>Secondary attractor: ${isNull(secondary)
        ? "<em>none</em>" : name(str(secondary))}</p>` +
      `<p>Converged at step ${num(get(res, "converged_at"))}; ` +
      `c0=${num(get(res, "c0"))}, c_final=${num(get(res, "c_final"))}</p>` +
      `<ol class="attractors">${attractors}</ol></div>`;
  }
  const alpha = get(res, "alpha_path");
  const beta = get(res, "beta_path");
  return `<div class="conclusion">` +
    `<p class="conclusion-text">${escapeHtml(str(get(res, "conclusion_text")))}</p>` +
    `<p>Composite confidence: ${num(get(res, "composite_confidence"))} ` +
    `(verifiability ${num(get(res, "verifiability"))}, ` +
    `kg consistency ${num(get(res, "kg_consistency"))})</p>` +
    `<h4>Alpha path</h4><ul>${isNull(alpha)
      ? emptyState("no transition candidates")
      : renderCandidate(alpha!)}</ul>` +
    `<h4>Beta path</h4><ul>${isNull(beta)
      ? emptyState("none") : renderCandidate(beta!)}</ul></div>`;
}

// --- tab 2: events --------------------------------------------------------------

export function renderEventsTab(doc: RawValue, kind: ResultKind): string {
  if (kind === "forecast") {
    return emptyState("Forecast runs start from patterns, not text; no extraction stage.");
  }
  const events = items(get(result(doc), "events"));
  if (events.length === 0) {
    return emptyState("No events extracted.");
  }
  const rows = events.map((event) => {
    const keywords = items(get(event, "matched_keywords"))
      .map((k) => escapeHtml(str(k))).join(", ");
    return `<tr><td>${escapeHtml(str(get(event, "event_type")))}</td>` +
      `<td>${num(get(event, "confidence"))}</td>` +
      `<td>${keywords}</td></tr>`;
  }).join("");
  return `<table class="events"><thead><tr><th>event</th><th>confidence</th>` +
    `<th>keywords</th></tr></thead><tbody>${rows}</tbody></table>`;
}

// --- tab 3: patterns -------------------------------------------------------------

export function renderPatternsTab(doc: RawValue, kind: ResultKind): string {
  const res = result(doc);
  if (kind === "forecast") {
    const steps = items(get(res, "steps"));
    const last = steps[steps.length - 1];
    const actives = entries(get(last, "active"))
      .map(([pattern, weight]) =>
        `<li>${name(pattern)} <span class="weight">${num(weight)}</span></li>`)
      .join("");
    const chain = steps.flatMap((step) =>
      items(get(step, "fired"))
        .filter((cand) => str(get(cand, "kind")) === "composition")
        .map((cand) =>
          `<li>step ${num(get(step, "step"))}: ` +
          `${name(str(get(cand, "source_a")))} + ${name(str(get(cand, "source_b")))} ` +
          `&rarr; ${name(str(get(cand, "target")))}</li>`)).join("");
    return `<h4>Final pattern weights</h4><ul class="active">${actives}</ul>` +
      `<h4>Composition chain</h4>` +
      (chain ? `<ol class="chain">${chain}</ol>`
             : emptyState("No composition rules fired."));
  }
  const actives = items(get(res, "active_patterns"))
    .map((entry) => `<li>${name(str(get(entry, "pattern")))} ` +
      `<span class="weight">${num(get(entry, "weight"))}</span></li>`).join("");
  const derived = items(get(res, "derived"))
    .filter((cand) => str(get(cand, "kind")) === "composition")
    .map((cand) =>
      `<li>${name(str(get(cand, "source_a")))} + ${name(str(get(cand, "source_b")))} ` +
      `&rarr; ${name(str(get(cand, "target")))}</li>`).join("");
  const factors = items(get(res, "driving_statements"))
    .map((s) => `<li>${escapeHtml(str(s))}</li>`).join("");
  return `<h4>Active patterns</h4>` +
    (actives ? `<ul class="active">${actives}</ul>` : emptyState("None activated.")) +
    `<h4>Composition logic</h4>` +
    (derived ? `<ol class="chain">${derived}</ol>` : emptyState("No compositions derived.")) +
    `<h4>Driving factors</h4>` +
    (factors ? `<ul class="factors">${factors}</ul>` : emptyState("None."));
}

// --- tab 4: probability tree -------------------------------------------------------

export function renderProbabilityTreeTab(doc: RawValue, kind: ResultKind): string {
  const res = result(doc);
  if (kind === "forecast") {
    const steps = items(get(res, "steps")).filter(
      (step) => items(get(step, "fired")).length > 0);
    if (steps.length === 0) {
      return emptyState("No transitions fired.");
    }
    return steps.map((step) => {
      const z = get(step, "z");
      const rows = items(get(step, "fired"))
        .map((cand) => renderCandidate(cand, z)).join("");
      return `<section class="tree-step"><h4>step ${num(get(step, "step"))} ` +
        `&mdash; Z=${num(z)}</h4><ul>${rows}</ul></section>`;
    }).join("");
  }
  const derived = items(get(res, "derived"));
  if (derived.length === 0) {
    return emptyState("No transition candidates derived.");
  }
  const z = get(res, "z");
  return `<section class="tree-step"><h4>derived transitions &mdash; Z=${num(z)}</h4>` +
    `<ul>${derived.map((cand) => renderCandidate(cand, z)).join("")}</ul></section>`;
}

// --- tab 5: vector space -------------------------------------------------------------

function renderVectorBars(vector: RawValue | undefined): string {
  const values = items(vector);
  return `<div class="vector-bars">` + values.map((component, i) => {
    const magnitude = Math.min(Math.abs(toNumber(component)), 1);
    const side = toNumber(component) < 0 ? "neg" : "pos";
    const width = (magnitude * 100).toFixed(1);
    return `<div class="bar-row"><span class="dim">${DIMENSIONS[i] ?? `d${i}`}</span>` +
      `<span class="bar ${side}" style="width:${width}px"></span> ${num(component)}</div>`;
  }).join("") + `</div>`;
}

function renderTrajectoryStrip(res: RawValue | undefined): string {
  const bifurcations = new Set(items(get(res, "bifurcation_points")).map(raw));
  const phases = new Set(items(get(res, "phase_transitions")).map(raw));
  const cells = items(get(res, "steps")).map((step) => {
    const index = raw(get(step, "step"));
    const markers =
      (bifurcations.has(index)
        ? `<span class="marker bifurcation" data-step="${index}" title="bifurcation">B</span>`
        : "") +
      (phases.has(index)
        ? `<span class="marker phase" data-step="${index}" title="phase transition">P</span>`
        : "");
    return `<div class="traj-step" data-step="${index}">` +
      `<span class="step-label">t=${index}</span>${markers}</div>`;
  }).join("");
  return `<div class="trajectory">${cells}</div>`;
}

function renderScatter(projection: RawValue | undefined): string {
  const points = items(projection);
  if (points.length === 0) {
    return emptyState("No projection served.");
  }
  const coords = points.map((p) => [toNumber(get(p, 0)), toNumber(get(p, 1))]);
  const span = Math.max(0.001, ...coords.flat().map(Math.abs));
  const scale = 90 / span;
  const dots = coords.map(([x, y], i) =>
    `<circle cx="${(100 + x * scale).toFixed(1)}" cy="${(100 - y * scale).toFixed(1)}" ` +
    `r="4"><title>point ${i}: (${escapeHtml(raw(get(points[i], 0)))}, ` +
    `${escapeHtml(raw(get(points[i], 1)))})</title></circle>`).join("");
  return `<svg class="scatter" viewBox="0 0 200 200" width="200" height="200">` +
    `<line x1="0" y1="100" x2="200" y2="100" class="axis"/>` +
    `<line x1="100" y1="0" x2="100" y2="200" class="axis"/>${dots}</svg>`;
}

export function renderLieTab(doc: RawValue, kind: ResultKind): string {
  const res = result(doc);
  if (kind === "forecast") {
    const steps = items(get(res, "steps"));
    const last = steps[steps.length - 1];
    return `<h4>Final state vector</h4>` +
      renderVectorBars(get(last, "state_vector")) +
      `<h4>Trajectory (bifurcation / phase markers)</h4>` +
      renderTrajectoryStrip(res);
  }
  return `<h4>State vector</h4>` +
    renderVectorBars(get(res, "state_vector")) +
    `<p>Dominant dimension: <strong>` +
    `${escapeHtml(str(get(res, "dominant_dimension_name")))}</strong></p>` +
    `<h4>2-D projection of active patterns</h4>` +
    renderScatter(get(res, "projection_2d"));
}

// --- assembly ---------------------------------------------------------------------

export interface Tab {
  id: string;
  label: string;
  html: string;
}

export function renderTabs(doc: RawValue, kind: ResultKind): Tab[] {
  return [
    { id: "conclusion", label: "Conclusion", html: renderConclusionTab(doc, kind) },
    { id: "events", label: "Events", html: renderEventsTab(doc, kind) },
    { id: "patterns", label: "Patterns", html: renderPatternsTab(doc, kind) },
    { id: "tree", label: "Probability Tree", html: renderProbabilityTreeTab(doc, kind) },
    { id: "lie", label: "Vector Space", html: renderLieTab(doc, kind) },
  ];
}

export function renderComparison(current: RawValue, currentKind: ResultKind,
                                 pinned: RawValue, pinnedKind: ResultKind): string {
  return `<div class="compare"><div class="compare-col">` +
    `<h3>Pinned</h3>${renderConclusionTab(pinned, pinnedKind)}</div>` +
    `<div class="compare-col"><h3>Current</h3>` +
    `${renderConclusionTab(current, currentKind)}</div></div>`;
}
