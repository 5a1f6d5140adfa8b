"""Command-line interface.

Subcommands: validate, forecast, analyze, scenarios, serve. Machine output
uses the same canonical documents the HTTP service returns, so the two
surfaces are interchangeable. Exit codes: 0 success, 1 validation failure,
2 usage/lookup errors.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import canonical
from .forecaster import ForecastResult, SimulationConfig
from .ontology import (
    DEFAULT_REGISTRY_PATH,
    PatternRegistry,
    RegistryError,
    load_registry,
)
from .pipeline import load_rules
from .service import (
    DEFAULT_TRACE_PATH,
    RequestProblem,
    TraceStore,
    create_app,
    make_trace,
    run_analyze_request,
    run_forecast_request,
    startup_validation,
)

REGISTRY_ENV_VAR = "PATTERNCAST_REGISTRY"

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2


def _registry_path(cli_value: str | None) -> Path:
    if cli_value:
        return Path(cli_value)
    env = os.environ.get(REGISTRY_ENV_VAR)
    return Path(env) if env else DEFAULT_REGISTRY_PATH


def _print_forecast_human(doc: dict) -> None:
    result = doc["result"]
    print(f"converged at step {result['converged_at']} "
          f"(c0={result['c0']:.4f}, c_final={result['c_final']:.4f})")
    print(f"primary attractor:   {result['primary']}")
    if result["secondary"]:
        print(f"secondary attractor: {result['secondary']}")
    bif = result["bifurcation_points"]
    print(f"bifurcation points:  {bif if bif else 'none'}")
    phases = result["phase_transitions"]
    print(f"phase transitions:   {phases if phases else 'none'}")
    print("attractors:")
    for entry in result["attractors"]:
        print(f"  {entry['posterior']:.4f}  {entry['pattern']}")
    print("step trace:")
    for step in result["steps"]:
        flags = "".join(["B" if step["bifurcation"] else "-",
                         "P" if step["phase_transition"] else "-"])
        top = sorted(step["active"].items(), key=lambda kv: (-kv[1], kv[0]))[:3]
        tops = ", ".join(f"{name}={w:.3f}" for name, w in top)
        news = f" new={step['new_patterns']}" if step["new_patterns"] else ""
        print(f"  t={step['step']} [{flags}] {tops}{news}")
    print(f"trace id: {doc['trace_id']}")


def _print_analysis_human(doc: dict) -> None:
    result = doc["result"]
    print("events:")
    for event in result["events"]:
        print(f"  {event['confidence']:.2f}  {event['event_type']}")
    print("active patterns:")
    for entry in result["active_patterns"]:
        print(f"  {entry['weight']:.4f}  {entry['pattern']}")
    print("derived transitions:")
    for cand in result["derived"]:
        src = cand["source_a"] if cand["source_b"] is None else \
            f"{cand['source_a']} + {cand['source_b']}"
        print(f"  {cand['normalized_posterior']:.4f}  [{cand['kind']}] {src} -> {cand['target']}")
    print(f"dominant dimension: {result['dominant_dimension_name']}")
    print(f"composite confidence: {result['composite_confidence']:.4f}")
    for statement in result["driving_statements"]:
        print(f"- {statement}")
    print()
    print(result["conclusion_text"])
    print(f"trace id: {doc['trace_id']}")


def cmd_validate(args: argparse.Namespace) -> int:
    try:
        reg = load_registry(_registry_path(args.registry))
    except RegistryError as exc:
        print(f"FAIL: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    problems = startup_validation(reg)
    if problems:
        print("FAIL:", file=sys.stderr)
        for problem in problems:
            print(f"  {problem}", file=sys.stderr)
        return EXIT_VALIDATION
    print(f"PASS: {len(reg.patterns)} patterns, {len(reg.composition)} composition rules, "
          f"{len(reg.inverses)} inverse entries")
    return EXIT_OK


def _load_registry_or_fail(args: argparse.Namespace) -> PatternRegistry:
    try:
        return load_registry(_registry_path(args.registry))
    except RegistryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_VALIDATION)


def cmd_forecast(args: argparse.Namespace) -> int:
    reg = _load_registry_or_fail(args)
    body: dict = {}
    if args.scenario:
        body["scenario"] = args.scenario
    if args.patterns:
        body["patterns"] = [p.strip() for p in args.patterns.split(",") if p.strip()]
    config: dict = {}
    if args.steps is not None:
        config["horizon_steps"] = args.steps
    if getattr(args, "lambda_", None) is not None:
        config["lambda"] = args.lambda_
    if config:
        body["config"] = config
    try:
        doc = run_forecast_request(reg, body)
    except RequestProblem as exc:
        print(f"error: {exc.message}", file=sys.stderr)
        return EXIT_USAGE
    if args.trace:
        TraceStore(args.trace_file).append(
            make_trace("forecast", doc["request_echo"], doc["result"]))
    if args.format == "machine":
        print(canonical.dumps(doc))
    else:
        _print_forecast_human(doc)
    return EXIT_OK


def cmd_analyze(args: argparse.Namespace) -> int:
    reg = _load_registry_or_fail(args)
    if args.text == "-":
        text = sys.stdin.read()
    else:
        path = Path(args.text)
        if not path.exists():
            print(f"error: no such file: {args.text}", file=sys.stderr)
            return EXIT_USAGE
        text = path.read_text(encoding="utf-8")
    rules = load_rules(args.rules) if args.rules else load_rules()
    body = {"text": text, "verifiability": args.verifiability,
            "kg_consistency": args.kg_consistency}
    try:
        doc = run_analyze_request(reg, rules, body)
    except RequestProblem as exc:
        print(f"error: {exc.message}", file=sys.stderr)
        return EXIT_USAGE
    if args.trace:
        TraceStore(args.trace_file).append(
            make_trace("analyze", doc["request_echo"], doc["result"]))
    if args.format == "machine":
        print(canonical.dumps(doc))
    else:
        _print_analysis_human(doc)
    return EXIT_OK


def cmd_scenarios(args: argparse.Namespace) -> int:
    reg = _load_registry_or_fail(args)
    if args.format == "machine":
        from .service import scenarios_document
        print(canonical.dumps(scenarios_document(reg)))
        return EXIT_OK
    for name in sorted(reg.scenarios):
        scenario = reg.scenarios[name]
        print(f"{name}")
        print(f"  {scenario.description}")
        for pattern in scenario.initial_patterns:
            print(f"  - {pattern}")
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    app = create_app(_registry_path(args.registry), trace_path=args.trace_file)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="patterncast",
        description="Deterministic trajectory forecasting over a pattern semigroup.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--registry", help="path to a registry document "
                       f"(default: ${REGISTRY_ENV_VAR} or the shipped registry)")

    p_validate = sub.add_parser("validate", help="run the algebraic validators")
    add_common(p_validate)
    p_validate.set_defaults(func=cmd_validate)

    p_forecast = sub.add_parser("forecast", help="forward-simulate a pattern set")
    add_common(p_forecast)
    p_forecast.add_argument("--scenario", help="named scenario from the registry")
    p_forecast.add_argument("--patterns", help="comma-separated pattern names")
    p_forecast.add_argument("--steps", type=int, help="horizon steps (default 6)")
    p_forecast.add_argument("--lambda", dest="lambda_", type=float,
                            help="step decay in (0, 1] (default 0.85)")
    p_forecast.add_argument("--format", choices=["human", "machine"], default="human")
    p_forecast.add_argument("--trace", action="store_true",
                            help="append the run to the trace store")
    p_forecast.add_argument("--trace-file", default=DEFAULT_TRACE_PATH)
    p_forecast.set_defaults(func=cmd_forecast)

    p_analyze = sub.add_parser("analyze", help="run the five-stage text pipeline")
    add_common(p_analyze)
    p_analyze.add_argument("--text", required=True, help="input file, or '-' for stdin")
    p_analyze.add_argument("--rules", help="path to a pipeline rules document")
    p_analyze.add_argument("--verifiability", type=float, default=1.0)
    p_analyze.add_argument("--kg-consistency", dest="kg_consistency",
                           type=float, default=1.0)
    p_analyze.add_argument("--format", choices=["human", "machine"], default="human")
    p_analyze.add_argument("--trace", action="store_true")
    p_analyze.add_argument("--trace-file", default=DEFAULT_TRACE_PATH)
    p_analyze.set_defaults(func=cmd_analyze)

    p_scenarios = sub.add_parser("scenarios", help="list named scenarios")
    add_common(p_scenarios)
    p_scenarios.add_argument("--format", choices=["human", "machine"], default="human")
    p_scenarios.set_defaults(func=cmd_scenarios)

    p_serve = sub.add_parser("serve", help="start the HTTP service")
    add_common(p_serve)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8321)
    p_serve.add_argument("--trace-file", default=DEFAULT_TRACE_PATH)
    p_serve.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
