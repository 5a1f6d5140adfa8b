import itertools
import random

import numpy as np
import pytest

from patterncast import canonical
from patterncast.forecaster import (
    SimulationConfig,
    TransitionCandidate,
    adjust_path_consistency,
    attractor_set,
    confidence,
    detect_bifurcation,
    path_adjustment_factor,
    simulate,
    step_candidates,
)
from patterncast.ontology import UnknownPatternError
from conftest import build_registry, build_registry_doc
from patterncast.ontology import load_registry


# --- confidence ------------------------------------------------------------

def test_confidence_zero_steps_is_identity():
    assert confidence(0.63, 0.85, 0) == 0.63


def test_confidence_decay_calibration():
    assert 0.37714 <= 0.85**6 <= 0.37716
    assert 0.2941 <= confidence(0.78, 0.85, 6) <= 0.2942


def test_confidence_monotone_decreasing():
    values = [confidence(0.8, 0.85, t) for t in range(8)]
    assert all(a > b for a, b in zip(values, values[1:]))


def test_confidence_validates_inputs():
    with pytest.raises(ValueError):
        confidence(0.0, 0.85, 1)
    with pytest.raises(ValueError):
        confidence(0.5, 1.5, 1)
    with pytest.raises(ValueError):
        confidence(0.5, 0.85, -1)


# --- bifurcation -----------------------------------------------------------

def test_bifurcation_close_pair():
    assert detect_bifurcation({"a": 0.50, "b": 0.40}) is True


def test_bifurcation_wide_pair():
    assert detect_bifurcation({"a": 0.60, "b": 0.40}) is False


def test_bifurcation_single_pattern():
    assert detect_bifurcation({"a": 1.0}) is False


def test_bifurcation_boundary_strict():
    # dyadic values make the gap exactly equal to delta; strict < means False
    assert detect_bifurcation({"a": 0.75, "b": 0.5}, delta=0.25) is False


def test_bifurcation_empty_rejected():
    with pytest.raises(ValueError):
        detect_bifurcation({})


# --- path adjustment -------------------------------------------------------

def test_path_factor_endpoints():
    assert path_adjustment_factor(0.0, 0.30) == pytest.approx(1.0 / 1.30, abs=1e-12)
    assert path_adjustment_factor(1.0, 0.30) == 1.0
    assert path_adjustment_factor(-0.5, 0.30) == pytest.approx(1.0 / 1.30, abs=1e-12)


def test_path_factor_bounds_random():
    rng = random.Random(4)
    for _ in range(500):
        c = rng.uniform(-1, 1)
        f = path_adjustment_factor(c, 0.30)
        assert 1.0 / 1.30 - 1e-12 <= f <= 1.0 + 1e-12


def make_candidate(reg, a, b, target, pi_a=0.5, pi_b=0.5):
    from patterncast.lie_space import lie_similarity
    sim = lie_similarity(reg.vector(a), reg.vector(b), reg.vector(target))
    raw = pi_a * pi_b * sim
    return TransitionCandidate(source_a=a, source_b=b, target=target,
                               kind="composition", pi_a=pi_a, pi_b=pi_b,
                               lie_sim=sim, decay_factor=1.0, raw_weight=raw,
                               adjusted_weight=raw, normalized_posterior=0.0)


def test_adjust_commuting_sources_neutral_flag():
    # proportional vectors commute: consistency 0, discount factor applies
    vec = [0.5, 0.1, 0.3, 0.0, 0.2, 0.4, 0.1, 0.6]
    reg = build_registry({"a": 0.5, "b": 0.5, "c": 0.5},
                         composition=[("a", "b", "c")],
                         vectors={"a": vec, "b": [x / 2 for x in vec]})
    cand = make_candidate(reg, "a", "b", "c")
    adjusted = adjust_path_consistency(cand, reg, 0.30)
    assert adjusted.consistency == 0.0
    assert adjusted.degenerate
    assert adjusted.adjusted_weight == pytest.approx(cand.raw_weight / 1.30, abs=1e-12)


def test_adjust_inverse_passthrough(registry):
    cand = TransitionCandidate(source_a="Hegemonic Sanctions", source_b=None,
                               target="Sanctions Relief / Normalisation",
                               kind="inverse", pi_a=0.5, pi_b=None, lie_sim=1.0,
                               decay_factor=1.0, raw_weight=0.1,
                               adjusted_weight=0.1, normalized_posterior=0.0)
    assert adjust_path_consistency(cand, registry, 0.30) is cand


def test_adjust_ratio_bounds_random(registry):
    rng = random.Random(8)
    rules = sorted(registry.composition)
    for _ in range(300):
        a, b = rules[rng.randrange(len(rules))]
        target = registry.composition[(a, b)]
        cand = make_candidate(registry, a, b, target,
                              pi_a=rng.uniform(0.05, 1.0), pi_b=rng.uniform(0.05, 1.0))
        adjusted = adjust_path_consistency(cand, registry, 0.30)
        ratio = adjusted.adjusted_weight / cand.raw_weight
        assert 1.0 / 1.30 - 1e-12 <= ratio <= 1.0 + 1e-12


# --- attractor set ---------------------------------------------------------

def attractor_oracle(composition, active):
    """Direct evaluation of the closure predicate over all pairs."""
    out = set()
    for p in active:
        if all(composition.get((p, q)) is None or composition.get((p, q)) in active
               for q in active):
            out.add(p)
    return out


def test_attractors_empty_table_all_attractors():
    reg = build_registry({"a": 0.5, "b": 0.5})
    assert attractor_set(reg, {"a", "b"}) == {"a", "b"}


def test_attractor_escaping_rule():
    reg = build_registry({"a": 0.5, "b": 0.5, "c": 0.5},
                         composition=[("a", "b", "c")])
    assert attractor_set(reg, {"a", "b"}) == {"b"}
    assert attractor_set(reg, {"a", "b", "c"}) == {"a", "b", "c"}


def test_attractor_unknown_pattern_rejected(registry):
    with pytest.raises(UnknownPatternError):
        attractor_set(registry, {"ghost"})


def test_attractor_empty_active_rejected(registry):
    with pytest.raises(ValueError):
        attractor_set(registry, set())


def test_attractors_match_oracle_random_tables():
    rng = random.Random(42)
    names = ["a", "b", "c", "d"]
    for _ in range(300):
        n = rng.randint(2, 4)
        pool = names[:n]
        composition = {}
        for x, y in itertools.product(pool, repeat=2):
            if rng.random() < 0.4:
                composition[(x, y)] = rng.choice(pool)
        reg = build_registry({p: 0.5 for p in pool},
                             composition=[(a, b, c) for (a, b), c in composition.items()])
        active = set(rng.sample(pool, rng.randint(1, n)))
        assert attractor_set(reg, active) == attractor_oracle(composition, active)


# --- simulation ------------------------------------------------------------

def test_simulate_isolated_pattern_converges_immediately():
    reg = build_registry({"solo": 0.7})
    result = simulate(reg, ["solo"])
    assert result.converged_at == 0
    assert result.primary == "solo"
    assert result.attractors == (("solo", 1.0),)
    assert result.c_final == 0.7


def test_simulate_requires_known_patterns(registry):
    with pytest.raises(UnknownPatternError):
        simulate(registry, ["No Such Pattern"])
    with pytest.raises(ValueError):
        simulate(registry, [])


def reachable_fixpoint_oracle(composition, inverses, initial):
    """Brute-force power-set iteration to the absolute fixpoint."""
    current = frozenset(initial)
    while True:
        nxt = set(current)
        for (a, b), c in composition.items():
            if a in current and b in current:
                nxt.add(c)
        for a in current:
            inv = inverses.get(a)
            if inv is not None:
                nxt.add(inv)
        nxt = frozenset(nxt)
        if nxt == current:
            return current
        current = nxt


def test_simulate_tiny_synthetic_matches_power_set_oracle():
    comp = {("a", "b"): "b", ("b", "a"): "b", ("b", "b"): "b"}
    reg = build_registry({"a": 0.6, "b": 0.5},
                         composition=[(x, y, z) for (x, y), z in comp.items()])
    result = simulate(reg, ["a", "b"])
    assert set(result.final_weights()) == reachable_fixpoint_oracle(comp, {}, {"a", "b"})
    # both elements are closed under the table: a never escapes, b maps to b
    assert set(n for n, _ in result.attractors) == {"a", "b"}


def test_simulate_reachable_sets_match_oracle_random():
    rng = random.Random(99)
    names = ["a", "b", "c", "d", "e"]
    for _ in range(100):
        n = rng.randint(2, 5)
        pool = names[:n]
        composition = {}
        for x, y in itertools.product(pool, repeat=2):
            if rng.random() < 0.3:
                composition[(x, y)] = rng.choice(pool)
        inverses = {}
        if rng.random() < 0.5 and n >= 2:
            inverses[pool[0]], inverses[pool[1]] = pool[1], pool[0]
        reg = build_registry({p: rng.uniform(0.3, 0.9) for p in pool},
                             composition=[(a, b, c) for (a, b), c in composition.items()],
                             inverses=sorted(inverses.items()))
        initial = set(rng.sample(pool, rng.randint(1, n)))
        result = simulate(reg, initial)
        oracle = reachable_fixpoint_oracle(composition, inverses, initial)
        if result.converged_at < SimulationConfig().horizon_steps:
            assert set(result.final_weights()) == oracle
        else:
            assert set(result.final_weights()) <= oracle


def test_simulate_monotone_reachable_set(registry):
    result = simulate(registry, registry.scenarios["china_taiwan_invasion"].initial_patterns)
    previous = set()
    for step in result.steps:
        current = set(step.active)
        assert previous <= current
        previous = current


def test_simulate_weights_normalized(registry):
    for scenario in registry.scenarios.values():
        result = simulate(registry, scenario.initial_patterns)
        for step in result.steps:
            assert sum(step.active.values()) == pytest.approx(1.0, abs=1e-9)
            if step.fired:
                assert sum(c.normalized_posterior for c in step.fired) == \
                    pytest.approx(1.0, abs=1e-9)
                assert all(0.0 <= c.normalized_posterior <= 1.0 for c in step.fired)


def test_simulate_candidates_sorted_descending(registry):
    result = simulate(registry, registry.scenarios["china_taiwan_invasion"].initial_patterns)
    for step in result.steps:
        weights = [c.adjusted_weight for c in step.fired]
        assert weights == sorted(weights, reverse=True)


def test_simulate_c_final_consistency(registry):
    for scenario in registry.scenarios.values():
        result = simulate(registry, scenario.initial_patterns)
        assert result.c_final == result.c0 * \
            SimulationConfig().decay_lambda**result.converged_at


def test_simulate_deterministic_repeat(registry):
    initial = registry.scenarios["russia_ukraine_war_trajectory"].initial_patterns
    doc1 = simulate(registry, initial).to_document()
    doc2 = simulate(registry, initial).to_document()
    assert canonical.dumps(doc1) == canonical.dumps(doc2)


def test_simulate_horizon_limits_steps(registry):
    cfg = SimulationConfig(horizon_steps=1)
    result = simulate(registry, registry.scenarios["china_taiwan_invasion"].initial_patterns, cfg)
    assert result.converged_at <= 1
    assert len(result.steps) <= 2


def test_simulate_inverse_candidates_target_inactive_only(registry):
    result = simulate(registry, registry.scenarios["china_taiwan_invasion"].initial_patterns)
    for i, step in enumerate(result.steps[1:], start=1):
        before = set(result.steps[i - 1].active)
        for cand in step.fired:
            if cand.kind == "inverse":
                assert cand.target not in before
                assert cand.raw_weight == pytest.approx(
                    0.20 * result.steps[i - 1].active[cand.source_a], abs=1e-12)


def test_simulate_decay_exponent_convention(registry):
    result = simulate(registry, registry.scenarios["us_china_tech_decoupling"].initial_patterns)
    lam = SimulationConfig().decay_lambda
    for step in result.steps[1:]:
        for cand in step.fired:
            if cand.kind == "composition":
                assert cand.decay_factor == pytest.approx(lam**step.step, abs=1e-12)
                assert cand.raw_weight == pytest.approx(
                    cand.pi_a * cand.pi_b * cand.lie_sim * cand.decay_factor, abs=1e-12)


def test_step_candidates_empty_for_closed_set():
    reg = build_registry({"a": 0.5, "b": 0.5}, inverses=[("a", "b"), ("b", "a")])
    cands, z = step_candidates(reg, {"a": 0.5, "b": 0.5}, 1, SimulationConfig())
    assert cands == []
    assert z == 0.0


def test_negative_similarity_rules_never_fire():
    # target vector opposes the source sum, so the rule is excluded
    doc = build_registry_doc(
        {"a": 0.5, "b": 0.5, "c": 0.5},
        composition=[("a", "b", "c")],
        vectors={"a": [0.5, 0, 0, 0, 0, 0, 0, 0],
                 "b": [0.4, 0, 0, 0, 0, 0, 0, 0],
                 "c": [-0.8, 0, 0, 0, 0, 0, 0, 0]})
    reg = load_registry(doc)
    result = simulate(reg, ["a", "b"])
    assert "c" not in result.final_weights()


def test_config_rejects_bad_values():
    with pytest.raises(ValueError):
        SimulationConfig(horizon_steps=0)
    with pytest.raises(ValueError):
        SimulationConfig(decay_lambda=0.0)
    with pytest.raises(ValueError):
        SimulationConfig.from_overrides({"nonsense": 1})


def test_config_override_roundtrip():
    cfg = SimulationConfig.from_overrides({"lambda": 0.7, "horizon_steps": 3})
    assert cfg.decay_lambda == 0.7
    assert cfg.horizon_steps == 3
    assert SimulationConfig.from_overrides(cfg.to_document()) == cfg
