"""HTTP service and trace persistence.

The service holds one immutable registry loaded at startup and treats
every request as a pure computation over it. Responses are rendered with
the canonical serializer, so identical requests produce byte-identical
bodies. Successful forecast/analyze calls append a content-addressed
trace record; the id doubles as a reproducibility receipt (first half
hashes the request echo, second half the result).
"""

from __future__ import annotations

import datetime
import json
import threading
from pathlib import Path
from typing import Any, Mapping

from fastapi import FastAPI, Request
from fastapi.responses import Response

from . import canonical
from .forecaster import SimulationConfig, simulate
from .ontology import (
    PatternRegistry,
    load_default_registry,
    load_registry,
    validate_composition_closure,
    validate_inverses,
)
from .pipeline import PipelineRules, load_rules, run_analysis

DEFAULT_TRACE_PATH = "patterncast_traces.jsonl"


class TraceStore:
    """Append-only, file-backed store of request/result receipts."""

    def __init__(self, path: str | Path = DEFAULT_TRACE_PATH):
        self.path = Path(path)
        self._lock = threading.Lock()

    def append(self, record: Mapping[str, Any]) -> None:
        line = canonical.dumps(record)
        with self._lock:
            if self._find(record["id"]) is not None:
                return
            with self.path.open("a", encoding="utf-8") as fh:
                fh.write(line + "\n")

    def get(self, trace_id: str) -> dict | None:
        with self._lock:
            return self._find(trace_id)

    def _find(self, trace_id: str) -> dict | None:
        if not self.path.exists():
            return None
        with self.path.open("r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                record = json.loads(line)
                if record.get("id") == trace_id:
                    return record
        return None


def make_trace(request_kind: str, request_echo: Mapping[str, Any],
               result: Mapping[str, Any]) -> dict:
    return {
        "id": canonical.trace_id(request_echo, result),
        "created_at": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "request_kind": request_kind,
        "request_echo": request_echo,
        "result": result,
    }


def registry_document(reg: PatternRegistry) -> dict:
    """Registry contents as a plain document (patterns, rules, inverses, vectors)."""
    return {
        "patterns": [
            {
                "name": p.name,
                "entity_src": p.entity_src.value,
                "relation": p.relation.value,
                "entity_tgt": p.entity_tgt.value,
                "domain": p.domain.value,
                "mechanism_class": p.mechanism_class,
                "confidence_prior": p.confidence_prior,
                "inverse_pattern": p.inverse_pattern,
                "typical_outcomes": list(p.typical_outcomes),
                "composition_hints": list(p.composition_hints),
                "provenance": p.provenance,
            }
            for _, p in sorted(reg.patterns.items())
        ],
        "composition_table": [
            [a, b, c, reg.composition_provenance.get((a, b), "completed")]
            for (a, b), c in sorted(reg.composition.items())
        ],
        "inverse_table": [[a, b] for a, b in sorted(reg.inverses.items())],
        "vectors": {name: [float(x) for x in reg.vector(name)]
                    for name in sorted(reg.patterns)},
    }


def scenarios_document(reg: PatternRegistry) -> dict:
    return {
        "scenarios": [
            {
                "name": s.name,
                "initial_patterns": list(s.initial_patterns),
                "description": s.description,
            }
            for _, s in sorted(reg.scenarios.items())
        ]
    }


class RequestProblem(Exception):
    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status
        self.message = message


def resolve_forecast_request(reg: PatternRegistry, body: Mapping[str, Any]) -> dict:
    """Validate a forecast request and build its canonical echo."""
    if not isinstance(body, Mapping):
        raise RequestProblem(400, "request body must be an object")
    scenario = body.get("scenario")
    patterns = body.get("patterns")
    if scenario is not None:
        if not isinstance(scenario, str):
            raise RequestProblem(400, "'scenario' must be a string")
        if scenario not in reg.scenarios:
            raise RequestProblem(404, f"unknown scenario: {scenario!r}")
        initial = list(reg.scenarios[scenario].initial_patterns)
        # a replayed request echo carries both fields; they must agree
        if patterns is not None and sorted(set(patterns)) != sorted(set(initial)):
            raise RequestProblem(400, "'patterns' conflicts with the named scenario")
    elif patterns is not None:
        if (not isinstance(patterns, list) or not patterns
                or not all(isinstance(p, str) for p in patterns)):
            raise RequestProblem(400, "'patterns' must be a non-empty list of strings")
        unknown = sorted(set(p for p in patterns if p not in reg.patterns))
        if unknown:
            raise RequestProblem(422, "unregistered pattern names: " + ", ".join(unknown))
        initial = patterns
    else:
        raise RequestProblem(400, "request needs 'scenario' or 'patterns'")
    overrides = body.get("config", {})
    if not isinstance(overrides, Mapping):
        raise RequestProblem(400, "'config' must be an object")
    try:
        cfg = SimulationConfig.from_overrides(overrides)
    except (ValueError, TypeError) as exc:
        raise RequestProblem(400, f"bad config: {exc}") from None
    return {
        "kind": "forecast",
        "scenario": scenario,
        "patterns": sorted(set(initial)),
        "config": cfg.to_document(),
    }


def run_forecast_request(reg: PatternRegistry, body: Mapping[str, Any]) -> dict:
    """Shared CLI/HTTP entry: returns the full response document."""
    echo = resolve_forecast_request(reg, body)
    cfg = SimulationConfig.from_overrides(echo["config"])
    result = simulate(reg, echo["patterns"], cfg).to_document()
    return {
        "request_echo": echo,
        "result": result,
        "trace_id": canonical.trace_id(echo, result),
    }


def resolve_analyze_request(body: Mapping[str, Any]) -> dict:
    if not isinstance(body, Mapping):
        raise RequestProblem(400, "request body must be an object")
    text = body.get("text")
    if not isinstance(text, str) or not text.strip():
        raise RequestProblem(400, "'text' must be a non-empty string")
    verifiability = body.get("verifiability", 1.0)
    kg_consistency = body.get("kg_consistency", 1.0)
    for label, value in (("verifiability", verifiability), ("kg_consistency", kg_consistency)):
        if not isinstance(value, (int, float)) or not (0.0 < float(value) <= 1.0):
            raise RequestProblem(400, f"'{label}' must be a number in (0, 1]")
    return {
        "kind": "analyze",
        "text": text,
        "verifiability": float(verifiability),
        "kg_consistency": float(kg_consistency),
    }


def run_analyze_request(reg: PatternRegistry, rules: PipelineRules,
                        body: Mapping[str, Any]) -> dict:
    echo = resolve_analyze_request(body)
    report = run_analysis(echo["text"], reg, rules,
                          verifiability=echo["verifiability"],
                          kg_consistency=echo["kg_consistency"])
    result = report.to_document()
    return {
        "request_echo": echo,
        "result": result,
        "trace_id": canonical.trace_id(echo, result),
    }


def _canonical_response(document: Any, status: int = 200) -> Response:
    return Response(content=canonical.dumps(document), status_code=status,
                    media_type="application/json")


def create_app(registry: PatternRegistry | str | Path | None = None,
               rules: PipelineRules | str | Path | None = None,
               trace_path: str | Path = DEFAULT_TRACE_PATH) -> FastAPI:
    """Build the HTTP application around one validated registry."""
    if registry is None:
        reg = load_default_registry()
    elif isinstance(registry, PatternRegistry):
        reg = registry
    else:
        reg = load_registry(registry)
    pipeline_rules = rules if isinstance(rules, PipelineRules) else load_rules(rules)
    traces = TraceStore(trace_path)
    reg_doc = registry_document(reg)
    reg_hash = canonical.content_hash(reg_doc)

    app = FastAPI(title="patterncast", version="0.1.0", docs_url=None, redoc_url=None)
    app.state.registry = reg
    app.state.trace_store = traces

    async def _read_body(request: Request) -> Mapping[str, Any]:
        raw = await request.body()
        try:
            body = json.loads(raw.decode("utf-8") if raw else "{}")
        except (UnicodeDecodeError, json.JSONDecodeError):
            raise RequestProblem(400, "request body is not valid JSON") from None
        if not isinstance(body, dict):
            raise RequestProblem(400, "request body must be a JSON object")
        return body

    @app.exception_handler(RequestProblem)
    async def _problem_handler(_request: Request, exc: RequestProblem) -> Response:
        return _canonical_response({"error": exc.message}, status=exc.status)

    @app.get("/health")
    async def health() -> Response:
        return _canonical_response({"status": "ok", "registry_hash": reg_hash})

    @app.get("/patterns")
    async def patterns() -> Response:
        return _canonical_response(reg_doc)

    @app.get("/scenarios")
    async def scenarios() -> Response:
        return _canonical_response(scenarios_document(reg))

    @app.post("/forecast")
    async def forecast(request: Request) -> Response:
        body = await _read_body(request)
        response = run_forecast_request(reg, body)
        traces.append(make_trace("forecast", response["request_echo"], response["result"]))
        return _canonical_response(response)

    @app.post("/analyze")
    async def analyze(request: Request) -> Response:
        body = await _read_body(request)
        response = run_analyze_request(reg, pipeline_rules, body)
        traces.append(make_trace("analyze", response["request_echo"], response["result"]))
        return _canonical_response(response)

    @app.get("/traces/{trace_id}")
    async def get_trace(trace_id: str) -> Response:
        record = traces.get(trace_id)
        if record is None:
            raise RequestProblem(404, f"unknown trace: {trace_id!r}")
        return _canonical_response(record)

    ui_dist = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    if ui_dist.is_dir():
        from fastapi.staticfiles import StaticFiles
        app.mount("/ui", StaticFiles(directory=ui_dist, html=True), name="ui")

    return app


def startup_validation(reg: PatternRegistry) -> list[str]:
    """Run both validators; returns a list of violations (empty = PASS)."""
    problems: list[str] = []
    for report in (validate_inverses(reg), validate_composition_closure(reg)):
        if not report.passed:
            problems.extend(f"{report.check}: {v}" for v in report.violations)
    return problems
