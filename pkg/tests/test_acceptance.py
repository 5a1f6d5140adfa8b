"""Acceptance suite: one test per release criterion, each printing a
pass/fail line (run with ``pytest tests/test_acceptance.py -v -s``)."""

import copy
import json
import random
import time

import numpy as np
import pytest
from fastapi.testclient import TestClient

from patterncast import canonical
from patterncast.cli import main as cli_main
from patterncast.forecaster import (
    SimulationConfig,
    TransitionCandidate,
    adjust_path_consistency,
    attractor_set,
    detect_bifurcation,
    confidence,
    path_adjustment_factor,
    simulate,
)
from patterncast.lie_space import (
    DIM,
    bracket,
    hat,
    lie_similarity,
    path_independence,
    path_independence_info,
    phase_detect,
)
from patterncast.ontology import (
    DEFAULT_REGISTRY_PATH,
    RegistryValidationError,
    load_registry,
    validate_composition_closure,
    validate_inverses,
)
from patterncast.pipeline import extract_events, run_analysis
from patterncast.service import create_app
from conftest import build_registry

TABLE_SCENARIOS = [
    "us_china_tech_decoupling",
    "us_china_trade_war",
    "us_china_financial_isolation",
    "china_taiwan_military_coercion",
    "china_taiwan_invasion",
    "russia_ukraine_war_trajectory",
]


def report(n: int, text: str) -> None:
    print(f"PASS  criterion {n:02d}: {text}")


def test_criterion_01_validators(registry):
    assert validate_inverses(registry).passed
    assert validate_composition_closure(registry).passed

    doc = json.loads(DEFAULT_REGISTRY_PATH.read_text())
    mutations = 0

    # drop one direction of an inverse pair, for 10 different rows
    for row in doc["inverse_table"][:10]:
        broken = copy.deepcopy(doc)
        broken["inverse_table"] = [r for r in doc["inverse_table"] if r != row]
        with pytest.raises(RegistryValidationError) as err:
            load_registry(broken)
        # the surviving direction (B -> A) is the named violation
        assert row[1] in str(err.value) and row[0] in str(err.value)
        mutations += 1

    # retarget each of 10 composition rules to an unknown name
    for i in range(10):
        broken = copy.deepcopy(doc)
        rule = broken["composition_table"][i]
        rule[2] = f"Unknown Target {i}"
        with pytest.raises(RegistryValidationError) as err:
            load_registry(broken)
        assert f"Unknown Target {i}" in str(err.value)
        assert rule[0] in str(err.value)
        mutations += 1

    assert mutations == 20
    report(1, "shipped registry validates; 20 single-edit mutations fail, "
              "each naming the offending entry")


def test_criterion_02_hat_map_exactness():
    rng = np.random.default_rng(2024)
    zero = np.zeros((DIM, DIM))
    for _ in range(1000):
        v = rng.uniform(-1, 1, DIM)
        m = hat(v)
        assert np.array_equal(m + m.T, zero)
    for c in (-3.0, -1.0, 0.0, 0.7, 2.5):
        assert np.array_equal(hat(c * np.ones(DIM)), zero)
    report(2, "hat(v) + hat(v)^T exactly zero on 1000 random vectors; "
              "constant vectors map to zero")


def test_criterion_03_bracket_algebra():
    rng = np.random.default_rng(31)

    def unit_skew():
        m = rng.normal(size=(DIM, DIM))
        s = m - m.T
        return s / np.linalg.norm(s)

    start = time.perf_counter()
    for _ in range(500):
        x, y, z = unit_skew(), unit_skew(), unit_skew()
        assert np.linalg.norm(bracket(x, y) + bracket(y, x)) <= 1e-12
        a, b = 0.6, -0.9
        residual = bracket(a * x + b * y, z) - a * bracket(x, z) - b * bracket(y, z)
        assert np.linalg.norm(residual) <= 1e-12
        jacobi = (bracket(x, bracket(y, z)) + bracket(y, bracket(z, x))
                  + bracket(z, bracket(x, y)))
        assert np.linalg.norm(jacobi) <= 1e-9
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0
    report(3, f"antisymmetry/bilinearity <= 1e-12 and Jacobi <= 1e-9 on 500 "
              f"unit-scale skew triples in {elapsed:.2f}s")


def test_criterion_04_lie_similarity():
    rng = np.random.default_rng(41)
    for _ in range(100):
        v = rng.uniform(-1, 1, DIM)
        if np.linalg.norm(v) < 1e-6:
            continue
        assert abs(lie_similarity(v, v, v) - 1.0) <= 1e-12
    e = [np.eye(DIM)[i] for i in range(DIM)]
    assert abs(lie_similarity(e[0], e[0], e[1])) <= 1e-12
    assert abs(lie_similarity(e[0], e[1], e[2])) <= 1e-12
    for _ in range(500):
        va, vb, vc = (rng.uniform(-1, 1, DIM) for _ in range(3))
        assert -1.0 <= lie_similarity(va, vb, vc) <= 1.0
    report(4, "self-similarity 1 within 1e-12, orthogonal targets 0 within "
              "1e-12, all outputs in [-1, 1]")


def test_criterion_05_decay_calibration():
    decayed = 0.85**6
    assert 0.37714 <= decayed <= 0.37716
    c = confidence(0.78, 0.85, 6)
    assert 0.2941 <= c <= 0.2942
    report(5, f"0.85^6 = {decayed:.6f}; confidence(0.78, 0.85, 6) = {c:.5f}")


def test_criterion_06_path_consistency_endpoints(registry):
    assert path_adjustment_factor(0.0, 0.30) == pytest.approx(1.0 / 1.3, abs=1e-9)
    assert path_adjustment_factor(1.0, 0.30) == 1.0
    rng = random.Random(61)
    rules = sorted(registry.composition)
    checked = 0
    while checked < 1000:
        a, b = rules[rng.randrange(len(rules))]
        target = registry.composition[(a, b)]
        pi_a, pi_b = rng.uniform(0.01, 1.0), rng.uniform(0.01, 1.0)
        sim = lie_similarity(registry.vector(a), registry.vector(b),
                             registry.vector(target))
        raw = pi_a * pi_b * sim
        cand = TransitionCandidate(source_a=a, source_b=b, target=target,
                                   kind="composition", pi_a=pi_a, pi_b=pi_b,
                                   lie_sim=sim, decay_factor=1.0, raw_weight=raw,
                                   adjusted_weight=raw, normalized_posterior=0.0)
        adjusted = adjust_path_consistency(cand, registry, 0.30)
        ratio = adjusted.adjusted_weight / raw
        assert 1.0 / 1.3 - 1e-9 <= ratio <= 1.0 + 1e-9
        checked += 1
    report(6, "discount factor 0.7692 at consistency 0, 1.0 at consistency 1; "
              "ratio within [1/1.3, 1] on 1000 random candidates")


def test_criterion_07_attractor_oracle():
    rng = random.Random(71)
    names = ["a", "b", "c", "d"]
    start = time.perf_counter()
    mismatches = 0
    for _ in range(1000):
        n = rng.randint(1, 4)
        pool = names[:n]
        table = {}
        for x in pool:
            for y in pool:
                if rng.random() < 0.45:
                    table[(x, y)] = rng.choice(pool)
        reg = build_registry({p: 0.5 for p in pool},
                             composition=[(x, y, z) for (x, y), z in table.items()])
        active = set(rng.sample(pool, rng.randint(1, n)))
        oracle = {p for p in active
                  if all(table.get((p, q)) is None or table.get((p, q)) in active
                         for q in active)}
        if attractor_set(reg, active) != oracle:
            mismatches += 1
    elapsed = time.perf_counter() - start
    assert mismatches == 0
    assert elapsed < 5.0
    report(7, f"attractor set matches brute-force closure predicate on 1000 "
              f"random tables in {elapsed:.2f}s")


def test_criterion_08_published_attractor_identities(registry):
    results = {}
    for name in TABLE_SCENARIOS:
        result = simulate(registry, registry.scenarios[name].initial_patterns)
        assert result.converged_at <= 6
        assert result.steps[-1].new_patterns == (), f"{name} hit the horizon"
        results[name] = result

    tech = results["us_china_tech_decoupling"]
    assert tech.primary == "Technology Standards Leadership"
    assert tech.bifurcation_points, "tech decoupling must flag a bifurcation"

    invasion = results["china_taiwan_invasion"]
    assert invasion.primary == "Multilateral Alliance Sanctions"
    ceasefire_paths = [c for step in invasion.steps for c in step.fired
                       if c.kind == "inverse"
                       and c.source_a == "Interstate Military Conflict"
                       and c.target == "Ceasefire / Peace Agreement"]
    assert ceasefire_paths, "inverse ceasefire path missing from the trace"
    posterior = dict(invasion.attractors).get("Ceasefire / Peace Agreement")
    assert posterior is not None
    assert posterior < 0.05
    report(8, "all six scenarios converge within 6 steps; tech decoupling -> "
              "Technology Standards Leadership with bifurcation; invasion -> "
              f"Multilateral Alliance Sanctions with ceasefire path at {posterior:.4f}")


def test_criterion_09_determinism(registry, tmp_path, capsys):
    for name in TABLE_SCENARIOS:
        initial = registry.scenarios[name].initial_patterns
        first = canonical.dumps(simulate(registry, initial).to_document())
        second = canonical.dumps(simulate(registry, initial).to_document())
        assert first == second

    client = TestClient(create_app(registry, trace_path=tmp_path / "t.jsonl"))
    for name in TABLE_SCENARIOS:
        r1 = client.post("/forecast", json={"scenario": name})
        r2 = client.post("/forecast", json={"scenario": name})
        assert r1.content == r2.content
        assert cli_main(["forecast", "--scenario", name, "--format", "machine"]) == 0
        cli_body = capsys.readouterr().out.strip()
        assert cli_body == r1.content.decode()
    report(9, "repeat runs byte-identical for all six scenarios; CLI machine "
              "output equals HTTP body")


def test_criterion_10_pipeline_coactivation_and_lock(registry, rules):
    headline = ("Air strikes on the city killed at least forty civilians, "
                "officials said, as the offensive intensified.")
    events = extract_events(headline, rules.event_rules)
    assert len(events) >= 2
    types = {e.event_type for e in events}
    assert {"military_strike", "humanitarian_crisis"} <= types

    baseline = run_analysis(headline, registry, rules)
    assert len(baseline.derived) <= 5
    weights = [c.adjusted_weight for c in baseline.derived]
    assert weights == sorted(weights, reverse=True)

    def evil_writer(doc):
        doc["composite_confidence"] = 1.0
        doc["derived"] = []
        doc["active_patterns"].append({"pattern": "Injected", "weight": 9.9})
        return "tampered conclusion"

    tampered = run_analysis(headline, registry, rules, writer=evil_writer)
    assert canonical.dump_bytes(tampered.locked_document()) == \
        canonical.dump_bytes(baseline.locked_document())
    assert tampered.conclusion_text == "tampered conclusion"
    report(10, "strike+casualty headline co-activates >= 2 events; derived "
               "list <= 5 and sorted; misbehaving writer cannot alter any "
               "locked field (byte-identical)")


def test_criterion_11_threshold_semantics():
    assert detect_bifurcation({"a": 0.50, "b": 0.40}, delta=0.15) is True
    assert detect_bifurcation({"a": 0.60, "b": 0.40}, delta=0.15) is False
    base = np.zeros(DIM)
    shift_at = base.copy()
    shift_at[0] = 0.25
    shift_above = base.copy()
    shift_above[0] = 0.30
    assert phase_detect(base, shift_at, theta=0.25) is False
    assert phase_detect(base, shift_above, theta=0.25) is True
    report(11, "bifurcation delta and phase theta are strict thresholds")


def test_criterion_12_path_independence_bounds():
    rng = np.random.default_rng(121)
    for _ in range(1000):
        va, vb = rng.uniform(-1, 1, DIM), rng.uniform(-1, 1, DIM)
        delta = path_independence(va, vb)
        assert 0.0 <= delta <= 1.0
    for _ in range(50):
        v = rng.uniform(-1, 1, DIM)
        c = rng.uniform(0.1, 3.0)
        delta, commuting = path_independence_info(v, c * v)
        assert commuting
        assert delta == 1.0
    report(12, "diagnostic in [0, 1] on 1000 random pairs; proportional pairs "
               "flagged as the commuting degenerate case")
