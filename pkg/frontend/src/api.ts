/** HTTP client for the forecasting service; all responses stay raw-parsed. */

import { parse, RawValue, str, get } from "./rawjson";

export interface ApiClient {
  getPatterns(): Promise<RawValue>;
  getScenarios(): Promise<RawValue>;
  postForecast(body: unknown): Promise<RawValue>;
  postAnalyze(body: unknown): Promise<RawValue>;
}

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

export class HttpApiClient implements ApiClient {
  constructor(private readonly base: string = "") {}

  private async request(path: string, init?: RequestInit): Promise<RawValue> {
    const response = await fetch(this.base + path, init);
    const text = await response.text();
    const value = parse(text);
    if (!response.ok) {
      throw new ApiError(response.status,
                         str(get(value, "error"), `request failed (${response.status})`));
    }
    return value;
  }

  getPatterns(): Promise<RawValue> {
    return this.request("/patterns");
  }

  getScenarios(): Promise<RawValue> {
    return this.request("/scenarios");
  }

  postForecast(body: unknown): Promise<RawValue> {
    return this.request("/forecast", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  postAnalyze(body: unknown): Promise<RawValue> {
    return this.request("/analyze", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }
}
