/**
 * Session state and the scenario editor's pure update logic.
 *
 * Results are held as raw-parsed API responses; pinning a result for
 * what-if comparison keeps the raw tree, so re-rendering the pinned side
 * always reproduces the original response strings.
 */

import { ApiClient } from "./api";
import { RawValue } from "./rawjson";

export interface SessionState {
  selectedScenario: string | null;
  workingPatterns: string[];
  lambdaText: string;
  stepsText: string;
  lastResult: RawValue | null;
  lastKind: "forecast" | "analyze" | null;
  comparison: RawValue | null;
  comparisonKind: "forecast" | "analyze" | null;
}

export interface EditOutcome {
  state: SessionState;
  error?: string;
}

export function initialState(): SessionState {
  return {
    selectedScenario: null,
    workingPatterns: [],
    lambdaText: "0.85",
    stepsText: "6",
    lastResult: null,
    lastKind: null,
    comparison: null,
    comparisonKind: null,
  };
}

export function selectScenario(state: SessionState, name: string,
                               scenarioPatterns: string[]): SessionState {
  return {
    ...state,
    selectedScenario: name,
    workingPatterns: [...scenarioPatterns],
  };
}

export function addPattern(state: SessionState, name: string,
                           registryNames: Set<string>): EditOutcome {
  const trimmed = name.trim();
  if (!registryNames.has(trimmed)) {
    return { state, error: `"${trimmed}" is not a registered pattern` };
  }
  if (state.workingPatterns.includes(trimmed)) {
    return { state, error: `"${trimmed}" is already in the working set` };
  }
  return {
    state: {
      ...state,
      selectedScenario: null,
      workingPatterns: [...state.workingPatterns, trimmed],
    },
  };
}

export function removePattern(state: SessionState, name: string): SessionState {
  return {
    ...state,
    selectedScenario: null,
    workingPatterns: state.workingPatterns.filter((p) => p !== name),
  };
}

export function setLambda(state: SessionState, text: string): EditOutcome {
  const value = Number(text);
  if (!text.trim() || !Number.isFinite(value) || value <= 0 || value > 1) {
    return { state, error: "step decay must be a number in (0, 1]" };
  }
  return { state: { ...state, lambdaText: text.trim() } };
}

export function setSteps(state: SessionState, text: string): EditOutcome {
  const value = Number(text);
  if (!Number.isInteger(value) || value < 1 || value > 50) {
    return { state, error: "horizon steps must be an integer between 1 and 50" };
  }
  return { state: { ...state, stepsText: text.trim() } };
}

export function pinComparison(state: SessionState): SessionState {
  return {
    ...state,
    comparison: state.lastResult,
    comparisonKind: state.lastKind,
  };
}

export function forecastRequestBody(state: SessionState): unknown {
  return {
    patterns: [...state.workingPatterns],
    config: {
      lambda: Number(state.lambdaText),
      horizon_steps: Number(state.stepsText),
    },
  };
}

export async function runForecast(state: SessionState,
                                  client: ApiClient): Promise<SessionState> {
  if (state.workingPatterns.length === 0) {
    throw new Error("the working pattern set is empty");
  }
  const result = await client.postForecast(forecastRequestBody(state));
  return { ...state, lastResult: result, lastKind: "forecast" };
}

export async function runAnalysis(state: SessionState, client: ApiClient,
                                  text: string): Promise<SessionState> {
  const result = await client.postAnalyze({ text });
  return { ...state, lastResult: result, lastKind: "analyze" };
}
