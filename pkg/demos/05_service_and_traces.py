#!/usr/bin/env python3
"""The HTTP surface and the content-addressed trace store.

Runs the app in-process (no sockets) and shows that responses are
byte-reproducible and that every stored trace is a replayable receipt.
For a real server use: patterncast serve --port 8321
"""

import json
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from patterncast import canonical, load_default_registry
from patterncast.service import create_app, run_forecast_request

reg = load_default_registry()
trace_path = Path(tempfile.mkdtemp()) / "traces.jsonl"
client = TestClient(create_app(reg, trace_path=trace_path))

print("GET /health ->", client.get("/health").json())
print()

patterns = client.get("/patterns").json()
print(f"GET /patterns -> {len(patterns['patterns'])} patterns, "
      f"{len(patterns['composition_table'])} rules")
scenarios = client.get("/scenarios").json()["scenarios"]
print(f"GET /scenarios -> {[s['name'] for s in scenarios][:4]} ...")
print()

payload = {"scenario": "us_china_tech_decoupling"}
first = client.post("/forecast", json=payload)
second = client.post("/forecast", json=payload)
print("POST /forecast twice, byte-identical bodies:", first.content == second.content)

body = first.json()
result = body["result"]
print("primary attractor:", result["primary"])
print("bifurcation points:", result["bifurcation_points"])
print()

print("probability tree for step 1 (prior_A x prior_B x lie_sim x decay / Z):")
for cand in result["steps"][1]["fired"]:
    if cand["kind"] == "composition":
        print(f"  {cand['pi_a']:.3f} x {cand['pi_b']:.3f} x {cand['lie_sim']:.3f} "
              f"x {cand['decay_factor']:.3f} -> posterior {cand['normalized_posterior']:.3f} "
              f"({cand['target']})")
    else:
        print(f"  0.20 x {cand['pi_a']:.3f} -> posterior "
              f"{cand['normalized_posterior']:.3f} ({cand['target']}, reversal)")
print()

# The trace id is a receipt: first half hashes the request echo, second
# half the result. Replaying the echo must reproduce the result hash.
trace_id = body["trace_id"]
stored = client.get(f"/traces/{trace_id}").json()
print("GET /traces/<id> -> request_kind:", stored["request_kind"])
replayed = run_forecast_request(reg, stored["request_echo"])
print("replayed result hash matches receipt:",
      canonical.content_hash(replayed["result"])[:16] == trace_id[16:])

analysis = client.post("/analyze", json={
    "text": "Air strikes killed civilians while a sanctions coalition formed.",
    "verifiability": 0.9}).json()
print()
print("POST /analyze -> events:",
      [e["event_type"] for e in analysis["result"]["events"]])
print("conclusion:", analysis["result"]["conclusion_text"][:100] + "...")
