"""Forward simulation of the pattern semigroup.

Starting from an initial pattern set with prior-derived weights, each step
enumerates every composition rule whose two sources are active, scores it

    weight = pi(A) * pi(B) * lie_similarity(A, B, C) * lambda**t

and adds low-probability inverse transitions at ``0.20 * pi(A)`` for every
active pattern whose inverse is not active yet. An optional
path-consistency adjustment rescales composition weights by how well the
bracket emergence vector aligns with the target. The partition function
(the sum of all candidate weights) turns weights into posteriors, which
merge additively into the next step's pattern weights.

The run halts at the first non-productive step (no genuinely new pattern
entered the reachable set) or at the horizon. Final confidence is
``c0 * lambda**T`` with ``c0`` the mean prior of the initial patterns.
Everything is deterministic: candidate enumeration, sorting, and merging
follow fixed orderings, so identical inputs yield identical results.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import lie_space
from .ontology import PatternRegistry, UnknownPatternError

DEFAULT_HORIZON = 6
DEFAULT_DECAY = 0.85
DEFAULT_PHASE_THETA = 0.25
DEFAULT_BIFURCATION_DELTA = 0.15
DEFAULT_PATH_ALPHA = 0.30
DEFAULT_INVERSE_WEIGHT = 0.20

#: Weight-sum tolerance used by invariants and sanity checks.
NORMALIZATION_TOL = 1e-9


@dataclass(frozen=True)
class SimulationConfig:
    horizon_steps: int = DEFAULT_HORIZON
    decay_lambda: float = DEFAULT_DECAY
    theta_phase: float = DEFAULT_PHASE_THETA
    delta_bifurcation: float = DEFAULT_BIFURCATION_DELTA
    alpha_path: float = DEFAULT_PATH_ALPHA
    inverse_weight_factor: float = DEFAULT_INVERSE_WEIGHT
    path_integration_enabled: bool = True
    #: How candidate posteriors merge into next-step weights. The shipped
    #: rule adds posteriors onto carried-over weights and renormalizes.
    merge_rule: str = "carryover_additive"

    def __post_init__(self) -> None:
        if self.horizon_steps < 1:
            raise ValueError("horizon_steps must be >= 1")
        if not (0.0 < self.decay_lambda <= 1.0):
            raise ValueError("decay_lambda must lie in (0, 1]")

    def to_document(self) -> dict:
        return {
            "horizon_steps": self.horizon_steps,
            "lambda": self.decay_lambda,
            "theta_phase": self.theta_phase,
            "delta_bifurcation": self.delta_bifurcation,
            "alpha_path": self.alpha_path,
            "inverse_weight_factor": self.inverse_weight_factor,
            "path_integration_enabled": self.path_integration_enabled,
            "merge_rule": self.merge_rule,
        }

    @classmethod
    def from_overrides(cls, overrides: Mapping[str, object] | None) -> "SimulationConfig":
        if not overrides:
            return cls()
        known = {
            "horizon_steps": "horizon_steps",
            "lambda": "decay_lambda",
            "decay_lambda": "decay_lambda",
            "theta_phase": "theta_phase",
            "delta_bifurcation": "delta_bifurcation",
            "alpha_path": "alpha_path",
            "inverse_weight_factor": "inverse_weight_factor",
            "path_integration_enabled": "path_integration_enabled",
            "merge_rule": "merge_rule",
        }
        kwargs = {}
        for key, value in overrides.items():
            if key not in known:
                raise ValueError(f"unknown config field: {key!r}")
            kwargs[known[key]] = value
        cfg = cls(**kwargs)
        if cfg.merge_rule != "carryover_additive":
            raise ValueError(f"unsupported merge rule: {cfg.merge_rule!r}")
        return cfg


@dataclass(frozen=True)
class TransitionCandidate:
    """One scored transition with its full compute trace."""

    source_a: str
    target: str
    kind: str  # "composition" | "inverse"
    pi_a: float
    raw_weight: float
    adjusted_weight: float
    normalized_posterior: float
    decay_factor: float
    lie_sim: float = 1.0
    source_b: str | None = None
    pi_b: float | None = None
    consistency: float | None = None
    degenerate: bool = False

    def to_document(self) -> dict:
        doc = {
            "source_a": self.source_a,
            "source_b": self.source_b,
            "target": self.target,
            "kind": self.kind,
            "pi_a": self.pi_a,
            "pi_b": self.pi_b,
            "lie_sim": self.lie_sim,
            "decay_factor": self.decay_factor,
            "raw_weight": self.raw_weight,
            "consistency": self.consistency,
            "adjusted_weight": self.adjusted_weight,
            "normalized_posterior": self.normalized_posterior,
            "degenerate": self.degenerate,
        }
        return doc


@dataclass(frozen=True)
class StepState:
    """Snapshot of one simulation step."""

    step: int
    active: dict[str, float]
    state_vector: np.ndarray
    fired: tuple[TransitionCandidate, ...]
    new_patterns: tuple[str, ...]
    phase_transition: bool
    bifurcation: bool
    #: Partition function: the sum of all candidate weights at this step.
    z: float = 0.0

    def to_document(self) -> dict:
        return {
            "step": self.step,
            "active": {k: float(v) for k, v in self.active.items()},
            "state_vector": [float(x) for x in self.state_vector],
            "fired": [c.to_document() for c in self.fired],
            "new_patterns": list(self.new_patterns),
            "phase_transition": self.phase_transition,
            "bifurcation": self.bifurcation,
            "z": self.z,
        }


@dataclass(frozen=True)
class ForecastResult:
    steps: tuple[StepState, ...]
    converged_at: int
    attractors: tuple[tuple[str, float], ...]
    primary: str
    secondary: str | None
    bifurcation_points: tuple[int, ...]
    phase_transitions: tuple[int, ...]
    c0: float
    c_final: float
    config_echo: SimulationConfig

    def final_weights(self) -> dict[str, float]:
        return dict(self.steps[-1].active)

    def to_document(self) -> dict:
        return {
            "steps": [s.to_document() for s in self.steps],
            "converged_at": self.converged_at,
            "attractors": [{"pattern": n, "posterior": float(w)} for n, w in self.attractors],
            "primary": self.primary,
            "secondary": self.secondary,
            "bifurcation_points": list(self.bifurcation_points),
            "phase_transitions": list(self.phase_transitions),
            "c0": self.c0,
            "c_final": self.c_final,
            "config": self.config_echo.to_document(),
        }


def confidence(c0: float, decay_lambda: float, steps: int) -> float:
    """Aggregate forecast confidence ``c0 * lambda**T``."""
    if not (0.0 < c0 <= 1.0):
        raise ValueError("c0 must lie in (0, 1]")
    if not (0.0 < decay_lambda <= 1.0):
        raise ValueError("decay_lambda must lie in (0, 1]")
    if steps < 0:
        raise ValueError("steps must be >= 0")
    return c0 * decay_lambda**steps


def detect_bifurcation(weights: Mapping[str, float],
                       delta: float = DEFAULT_BIFURCATION_DELTA) -> bool:
    """True iff the two highest weights are strictly closer than ``delta``.

    A single pattern cannot bifurcate: there is no second attractor.
    """
    if not weights:
        raise ValueError("weights must be non-empty")
    if len(weights) < 2:
        return False
    top = sorted(weights.values(), reverse=True)
    return abs(top[0] - top[1]) < delta


def attractor_set(reg: PatternRegistry, final_active: Iterable[str]) -> set[str]:
    """Patterns whose every defined composition with co-active patterns
    stays inside the active set (the algebraic termination condition)."""
    active = set(final_active)
    if not active:
        raise ValueError("final_active must be non-empty")
    for name in active:
        if name not in reg.patterns:
            raise UnknownPatternError(f"unknown pattern name: {name!r}")
    out = set()
    for p in active:
        closed = True
        for q in active:
            target = reg.composition.get((p, q))
            if target is not None and target not in active:
                closed = False
                break
        if closed:
            out.add(p)
    return out


def path_adjustment_factor(consistency: float, alpha: float) -> float:
    """Rescaling factor ``(1 + alpha * max(0, consistency)) / (1 + alpha)``.

    Ranges from ``1/(1+alpha)`` (orthogonal or opposed paths: a structural
    discount) up to 1.0 (fully aligned paths restore the Bayesian weight).
    """
    return (1.0 + alpha * max(0.0, consistency)) / (1.0 + alpha)


def adjust_path_consistency(candidate: TransitionCandidate, reg: PatternRegistry,
                            alpha: float = DEFAULT_PATH_ALPHA) -> TransitionCandidate:
    """Apply the path-consistency adjustment to a composition candidate.

    Consistency is the cosine of the bracket emergence vector of the two
    sources against the target vector; commuting sources get a neutral 0
    with the degenerate flag set. Inverse candidates pass through unchanged.
    """
    if candidate.kind != "composition" or candidate.source_b is None:
        return candidate
    consistency, degenerate = lie_space.consistency_alignment(
        reg.vector(candidate.source_a), reg.vector(candidate.source_b),
        reg.vector(candidate.target))
    factor = path_adjustment_factor(consistency, alpha)
    return dataclasses.replace(
        candidate,
        consistency=consistency,
        degenerate=candidate.degenerate or degenerate,
        adjusted_weight=candidate.raw_weight * factor,
    )


def _candidate_sort_key(c: TransitionCandidate):
    return (-c.adjusted_weight, c.target, c.source_a, c.source_b or "")


def _enumerate_candidates(reg: PatternRegistry, active: Mapping[str, float],
                          decay: float, cfg: SimulationConfig) -> list[TransitionCandidate]:
    """Raw candidates for one step, in deterministic enumeration order.

    Compositions with non-positive lie similarity are geometrically
    implausible and are excluded so posteriors form a distribution.
    """
    candidates: list[TransitionCandidate] = []
    for (a, b) in sorted(reg.composition):
        if a not in active or b not in active:
            continue
        target = reg.composition[(a, b)]
        sim = lie_space.lie_similarity(reg.vector(a), reg.vector(b), reg.vector(target))
        if sim <= 0.0:
            continue
        raw = active[a] * active[b] * sim * decay
        candidates.append(TransitionCandidate(
            source_a=a, source_b=b, target=target, kind="composition",
            pi_a=active[a], pi_b=active[b], lie_sim=sim, decay_factor=decay,
            raw_weight=raw, adjusted_weight=raw, normalized_posterior=0.0))
    for a in sorted(active):
        inverse = reg.inverses.get(a)
        if inverse is None or inverse in active:
            continue
        raw = cfg.inverse_weight_factor * active[a]
        candidates.append(TransitionCandidate(
            source_a=a, source_b=None, target=inverse, kind="inverse",
            pi_a=active[a], pi_b=None, lie_sim=1.0, decay_factor=1.0,
            raw_weight=raw, adjusted_weight=raw, normalized_posterior=0.0))
    return candidates


def step_candidates(reg: PatternRegistry, active: Mapping[str, float], step: int,
                    cfg: SimulationConfig) -> tuple[list[TransitionCandidate], float]:
    """Scored, normalized, sorted candidates for step ``step``, plus Z."""
    decay = cfg.decay_lambda**step
    candidates = _enumerate_candidates(reg, active, decay, cfg)
    if cfg.path_integration_enabled:
        candidates = [adjust_path_consistency(c, reg, cfg.alpha_path) for c in candidates]
    z = sum(c.adjusted_weight for c in candidates)
    if z > 0:
        candidates = [dataclasses.replace(c, normalized_posterior=c.adjusted_weight / z)
                      for c in candidates]
    return sorted(candidates, key=_candidate_sort_key), z


def _normalized(weights: Mapping[str, float]) -> dict[str, float]:
    total = sum(weights.values())
    if total <= 0:
        raise ValueError("weights must have positive total")
    return {name: weights[name] / total for name in sorted(weights)}


def _state_vector(reg: PatternRegistry, active: Mapping[str, float]) -> np.ndarray:
    names = sorted(active)
    return lie_space.weighted_mean([reg.vector(n) for n in names],
                                   [active[n] for n in names])


def simulate(reg: PatternRegistry, initial: Iterable[str],
             cfg: SimulationConfig | None = None) -> ForecastResult:
    """Run the forward simulation from an initial pattern set."""
    cfg = cfg or SimulationConfig()
    initial_names = sorted(set(initial))
    if not initial_names:
        raise ValueError("initial pattern set must be non-empty")
    for name in initial_names:
        if name not in reg.patterns:
            raise UnknownPatternError(f"unknown pattern name: {name!r}")

    priors = {name: reg.patterns[name].confidence_prior for name in initial_names}
    active = _normalized(priors)
    c0 = sum(priors.values()) / len(priors)

    v0 = _state_vector(reg, active)
    steps = [StepState(step=0, active=dict(active), state_vector=v0, fired=(),
                       new_patterns=tuple(initial_names), phase_transition=False,
                       bifurcation=False)]
    converged_at = 0
    prev_vector = v0

    for t in range(1, cfg.horizon_steps + 1):
        candidates, z = step_candidates(reg, active, t, cfg)
        if not candidates:
            break
        merged = dict(active)
        for c in candidates:
            merged[c.target] = merged.get(c.target, 0.0) + c.normalized_posterior
        new_names = tuple(sorted(set(merged) - set(active)))
        active = _normalized(merged)
        vector = _state_vector(reg, active)
        steps.append(StepState(
            step=t,
            active=dict(active),
            state_vector=vector,
            fired=tuple(candidates),
            new_patterns=new_names,
            phase_transition=lie_space.phase_detect(prev_vector, vector, cfg.theta_phase),
            bifurcation=detect_bifurcation(active, cfg.delta_bifurcation),
            z=z,
        ))
        prev_vector = vector
        converged_at = t
        if not new_names:
            break

    final_active = steps[-1].active
    attractor_names = attractor_set(reg, final_active.keys())
    ranked = sorted(((name, final_active[name]) for name in attractor_names),
                    key=lambda item: (-item[1], item[0]))
    primary = ranked[0][0] if ranked else max(final_active, key=lambda n: (final_active[n], n))
    secondary = ranked[1][0] if len(ranked) > 1 else None

    return ForecastResult(
        steps=tuple(steps),
        converged_at=converged_at,
        attractors=tuple(ranked),
        primary=primary,
        secondary=secondary,
        bifurcation_points=tuple(s.step for s in steps if s.bifurcation),
        phase_transitions=tuple(s.step for s in steps if s.phase_transition),
        c0=c0,
        c_final=confidence(c0, cfg.decay_lambda, converged_at),
        config_echo=cfg,
    )
