/** DOM bootstrap: wires the editor, run/pin controls, and the tab views. */

import { HttpApiClient } from "./api";
import { get, items, str } from "./rawjson";
import {
  SessionState,
  addPattern,
  initialState,
  pinComparison,
  removePattern,
  runAnalysis,
  runForecast,
  selectScenario,
  setLambda,
  setSteps,
} from "./state";
import { renderComparison, renderTabs } from "./render";

const client = new HttpApiClient("..");

let state: SessionState = initialState();
let registryNames = new Set<string>();
let scenarioPatterns = new Map<string, string[]>();
let activeTab = "conclusion";
let runCounter = 0;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function setError(message: string): void {
  el("editor-error").textContent = message;
}

function renderChips(): void {
  const chips = el("pattern-chips");
  chips.innerHTML = "";
  for (const pattern of state.workingPatterns) {
    const chip = document.createElement("span");
    chip.className = "chip";
    chip.textContent = pattern;
    const remove = document.createElement("button");
    remove.textContent = "×";
    remove.title = `remove ${pattern}`;
    remove.addEventListener("click", () => {
      state = removePattern(state, pattern);
      renderChips();
    });
    chip.appendChild(remove);
    chips.appendChild(chip);
  }
}

function renderResult(): void {
  const container = el("tabs");
  const body = el("tab-body");
  if (!state.lastResult || !state.lastKind) {
    container.innerHTML = "";
    body.innerHTML = "<p class='empty-state'>Run a forecast or an analysis.</p>";
    return;
  }
  const tabs = renderTabs(state.lastResult, state.lastKind);
  container.innerHTML = "";
  for (const tab of tabs) {
    const button = document.createElement("button");
    button.textContent = tab.label;
    button.className = tab.id === activeTab ? "tab active" : "tab";
    button.addEventListener("click", () => {
      activeTab = tab.id;
      renderResult();
    });
    container.appendChild(button);
  }
  const current = tabs.find((t) => t.id === activeTab) ?? tabs[0];
  body.innerHTML = current.html;

  const compare = el("comparison");
  if (state.comparison && state.comparisonKind) {
    compare.innerHTML = renderComparison(state.lastResult, state.lastKind,
                                         state.comparison, state.comparisonKind);
  } else {
    compare.innerHTML = "";
  }
}

async function doRun(): Promise<void> {
  setError("");
  const ticket = ++runCounter;
  try {
    const next = await runForecast(state, client);
    if (ticket === runCounter) {  // latest-wins for overlapping requests
      state = next;
      renderResult();
    }
  } catch (error) {
    setError(error instanceof Error ? error.message : String(error));
  }
}

async function doAnalyze(): Promise<void> {
  setError("");
  const text = el<HTMLTextAreaElement>("analyze-text").value;
  if (!text.trim()) {
    setError("paste some text to analyze");
    return;
  }
  const ticket = ++runCounter;
  try {
    const next = await runAnalysis(state, client, text);
    if (ticket === runCounter) {
      state = next;
      renderResult();
    }
  } catch (error) {
    setError(error instanceof Error ? error.message : String(error));
  }
}

async function bootstrap(): Promise<void> {
  const patterns = await client.getPatterns();
  registryNames = new Set(
    items(get(patterns, "patterns")).map((p) => str(get(p, "name"))));
  const datalist = el("pattern-options");
  for (const name of [...registryNames].sort()) {
    const option = document.createElement("option");
    option.value = name;
    datalist.appendChild(option);
  }

  const scenarios = await client.getScenarios();
  const select = el<HTMLSelectElement>("scenario-select");
  for (const scenario of items(get(scenarios, "scenarios"))) {
    const name = str(get(scenario, "name"));
    scenarioPatterns.set(name,
      items(get(scenario, "initial_patterns")).map((p) => str(p)));
    const option = document.createElement("option");
    option.value = name;
    option.textContent = name;
    select.appendChild(option);
  }

  select.addEventListener("change", () => {
    const chosen = select.value;
    if (scenarioPatterns.has(chosen)) {
      state = selectScenario(state, chosen, scenarioPatterns.get(chosen)!);
      renderChips();
    }
  });

  el("add-pattern").addEventListener("click", () => {
    const input = el<HTMLInputElement>("pattern-input");
    const outcome = addPattern(state, input.value, registryNames);
    state = outcome.state;
    setError(outcome.error ?? "");
    if (!outcome.error) {
      input.value = "";
      renderChips();
    }
  });

  el<HTMLInputElement>("lambda-input").addEventListener("change", (event) => {
    const outcome = setLambda(state, (event.target as HTMLInputElement).value);
    state = outcome.state;
    setError(outcome.error ?? "");
  });

  el<HTMLInputElement>("steps-input").addEventListener("change", (event) => {
    const outcome = setSteps(state, (event.target as HTMLInputElement).value);
    state = outcome.state;
    setError(outcome.error ?? "");
  });

  el("run-button").addEventListener("click", () => void doRun());
  el("analyze-button").addEventListener("click", () => void doAnalyze());
  el("pin-button").addEventListener("click", () => {
    state = pinComparison(state);
    renderResult();
  });

  renderChips();
  renderResult();
}

void bootstrap().catch((error) => {
  setError(`failed to load registry: ${error}`);
});
