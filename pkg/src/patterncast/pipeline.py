"""Five-stage evented analysis pipeline.

Stage 1 extracts events from raw text with compound keyword rules (every
trigger group of a rule must match; companion events are co-activated so
military/crisis news always yields at least two events). Stage 2a resolves
each event's candidate triples to registered patterns and scales priors by
extraction confidence. Stage 2b enumerates transitions where at least one
composition argument is active. Stage 2c computes the weighted mean state
vector, its dominant dimension, and a 2-D projection. Stage 2d aggregates
driving factors by mechanism class. Stage 3 assembles the conclusion:
every numeric field is computed and locked before any external text writer
runs; a misbehaving or failing writer can only lose its text, never change
a number.
"""

from __future__ import annotations

import copy
import dataclasses
import json
import logging
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Mapping, Sequence

import numpy as np

from . import canonical, lie_space
from .forecaster import TransitionCandidate, adjust_path_consistency, DEFAULT_INVERSE_WEIGHT
from .ontology import (
    DynamicPattern,
    PatternRegistry,
    coupling_asymmetry,
    lookup_pattern_by_strings,
)

logger = logging.getLogger(__name__)

DEFAULT_RULES_PATH = Path(__file__).parent / "data" / "pipeline_rules.json"

#: Confidence discount applied to the composition partner that is not in
#: the active set; latent evidence should not count like observed evidence.
LATENT_PARTNER_DISCOUNT = 0.5

DERIVED_TOP_K = 5

KG_COEFFICIENT = 0.4


@dataclass(frozen=True)
class EventRule:
    event_type: str
    trigger_groups: tuple[tuple[str, ...], ...]
    base_confidence: float
    companion_events: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.trigger_groups:
            raise ValueError(f"event rule {self.event_type!r} needs at least one trigger group")
        if not (0.0 < self.base_confidence <= 1.0):
            raise ValueError(f"event rule {self.event_type!r}: confidence must lie in (0, 1]")


@dataclass(frozen=True)
class ExtractedEvent:
    event_type: str
    confidence: float
    matched_keywords: tuple[str, ...]
    span_hints: tuple[int, ...]

    def to_document(self) -> dict:
        return {
            "event_type": self.event_type,
            "confidence": self.confidence,
            "matched_keywords": list(self.matched_keywords),
            "span_hints": list(self.span_hints),
        }


@dataclass(frozen=True)
class DomainHint:
    event_type: str
    candidate_triples: tuple[tuple[str, str, str], ...]

    def __post_init__(self) -> None:
        if not self.candidate_triples:
            raise ValueError(f"domain hint {self.event_type!r} needs at least one triple")


@dataclass(frozen=True)
class TriggerAmplification:
    """Non-normalising amplification of a trigger's effective weight.

    With no knowledge-graph evidence (w_kg = 0) the formula degrades to
    ``clamp(w_causal + delta_domain)``: the KG coefficient disappears
    instead of being redistributed.
    """

    w_kg: float
    w_causal: float
    delta_domain: float
    kg_coefficient: float = KG_COEFFICIENT
    amplification: float = field(init=False)

    def __post_init__(self) -> None:
        if self.w_kg < 0 or self.w_causal < 0:
            raise ValueError("w_kg and w_causal must be non-negative")
        raw = self.kg_coefficient * self.w_kg + self.w_causal + self.delta_domain
        object.__setattr__(self, "amplification", max(0.0, min(1.0, raw)))


@dataclass
class PipelineRules:
    event_rules: list[EventRule]
    domain_hints: list[DomainHint]
    templates: dict[str, str]
    conclusion_template: str


@dataclass
class AnalysisReport:
    events: list[ExtractedEvent]
    active_patterns: list[tuple[DynamicPattern, float]]
    derived: list[TransitionCandidate]
    state_vector: np.ndarray
    dominant: int
    projection_2d: list[tuple[float, float]]
    driving_factors: list[tuple[str, float, list[str]]]
    driving_statements: list[str]
    alpha_path: TransitionCandidate | None
    beta_path: TransitionCandidate | None
    composite_confidence: float
    verifiability: float
    kg_consistency: float
    partition: float = 0.0
    domain_concentration: float = 0.0
    conclusion_text: str = ""
    numeric_fields_locked: bool = True

    def locked_document(self) -> dict:
        """Every field except the free-text conclusion, as a plain document."""
        return {
            "events": [e.to_document() for e in self.events],
            "active_patterns": [{"pattern": p.name, "weight": w}
                                for p, w in self.active_patterns],
            "derived": [c.to_document() for c in self.derived],
            "state_vector": [float(x) for x in self.state_vector],
            "dominant_dimension": self.dominant,
            "dominant_dimension_name": lie_space.DIMENSIONS[self.dominant],
            "projection_2d": [[x, y] for x, y in self.projection_2d],
            "driving_factors": [{"mechanism_class": m, "weight": w, "outcomes": list(o)}
                                for m, w, o in self.driving_factors],
            "driving_statements": list(self.driving_statements),
            "alpha_path": self.alpha_path.to_document() if self.alpha_path else None,
            "beta_path": self.beta_path.to_document() if self.beta_path else None,
            "composite_confidence": self.composite_confidence,
            "verifiability": self.verifiability,
            "kg_consistency": self.kg_consistency,
            "z": self.partition,
            "coupling_asymmetry": self.domain_concentration,
            "numeric_fields_locked": self.numeric_fields_locked,
        }

    def to_document(self) -> dict:
        doc = self.locked_document()
        doc["conclusion_text"] = self.conclusion_text
        return doc


#: An external text writer receives the locked-field document and returns
#: the conclusion text. Transport is the caller's concern.
TextWriter = Callable[[dict], str]


def load_rules(source: str | Path | Mapping[str, Any] | None = None) -> PipelineRules:
    """Load event rules, domain hints, and templates from a rules document."""
    if source is None:
        source = DEFAULT_RULES_PATH
    if isinstance(source, (str, Path)):
        doc = json.loads(Path(source).read_text(encoding="utf-8"))
    else:
        doc = source
    rules = [EventRule(event_type=r["event_type"],
                       trigger_groups=tuple(tuple(k.lower() for k in g)
                                            for g in r["trigger_groups"]),
                       base_confidence=float(r["base_confidence"]),
                       companion_events=tuple(r.get("companion_events", [])))
             for r in doc.get("event_rules", [])]
    hints = [DomainHint(event_type=h["event_type"],
                        candidate_triples=tuple(tuple(t) for t in h["candidate_triples"]))
             for h in doc.get("domain_hints", [])]
    templates = dict(doc.get("templates", {}))
    conclusion = doc.get("conclusion_template", templates.get("generic", ""))
    return PipelineRules(rules, hints, templates, conclusion)


_WORD_SPLIT = re.compile(r"[^a-z0-9]+")


def _normalize_text(text: str) -> str:
    return " " + " ".join(t for t in _WORD_SPLIT.split(text.lower()) if t) + " "


def extract_events(text: str, rules: Sequence[EventRule]) -> list[ExtractedEvent]:
    """Stage 1: compound keyword extraction.

    A rule fires iff every trigger group has at least one keyword present
    in the lowercased text; companion events are emitted at the same
    confidence. Duplicate event types keep the highest confidence. Output
    is ordered by descending confidence, then event type.
    """
    if not rules:
        raise ValueError("at least one event rule is required")
    normalized = _normalize_text(text)
    found: dict[str, ExtractedEvent] = {}

    def emit(event_type: str, confidence: float, matched: tuple[str, ...],
             spans: tuple[int, ...]) -> None:
        existing = found.get(event_type)
        if existing is None or confidence > existing.confidence:
            found[event_type] = ExtractedEvent(event_type, confidence, matched, spans)

    for rule in rules:
        matched: list[str] = []
        spans: list[int] = []
        fired = True
        for group in rule.trigger_groups:
            group_hits = [kw for kw in group if f" {_normalize_text(kw).strip()} " in normalized]
            if not group_hits:
                fired = False
                break
            for kw in group_hits:
                if kw not in matched:
                    matched.append(kw)
                    spans.append(max(text.lower().find(kw), 0))
        if not fired:
            continue
        emit(rule.event_type, rule.base_confidence, tuple(matched), tuple(spans))
        for companion in rule.companion_events:
            emit(companion, rule.base_confidence, tuple(matched), tuple(spans))

    return sorted(found.values(), key=lambda e: (-e.confidence, e.event_type))


def activate_patterns(events: Sequence[ExtractedEvent], hints: Sequence[DomainHint],
                      reg: PatternRegistry) -> list[tuple[DynamicPattern, float]]:
    """Stage 2a: resolve hint triples, scale priors, normalize to sum 1.

    Duplicate activations keep the maximum weight; unresolvable triples are
    skipped with a log note.
    """
    hint_index: dict[str, DomainHint] = {h.event_type: h for h in hints}
    weights: dict[str, float] = {}
    resolved: dict[str, DynamicPattern] = {}
    for event in events:
        hint = hint_index.get(event.event_type)
        if hint is None:
            logger.debug("no domain hint for event type %r", event.event_type)
            continue
        for src, rel, tgt in hint.candidate_triples:
            match = lookup_pattern_by_strings(reg, src, rel, tgt)
            if match is None:
                logger.debug("unresolvable triple (%r, %r, %r) for event %r",
                             src, rel, tgt, event.event_type)
                continue
            pattern, _score = match
            weight = pattern.confidence_prior * event.confidence
            if weight > weights.get(pattern.name, 0.0):
                weights[pattern.name] = weight
                resolved[pattern.name] = pattern
    total = sum(weights.values())
    if total <= 0:
        return []
    return [(resolved[name], weights[name] / total) for name in sorted(weights)]


def enumerate_transitions(active: Sequence[tuple[DynamicPattern, float]],
                          reg: PatternRegistry, *,
                          inverse_weight_factor: float = DEFAULT_INVERSE_WEIGHT,
                          path_integration: bool = False,
                          alpha_path: float = 0.30) -> list[TransitionCandidate]:
    """Stage 2b: single-shot transition enumeration (no step decay).

    Scans the whole composition table for rules with at least one active
    argument; the inactive partner contributes its prior at the latent
    discount. Inverse transitions fire toward inactive inverses at
    ``0.20 * pi(A)``. Posteriors are normalized over all candidates, then
    the top-5 by weight are returned.
    """
    return _scored_transitions(active, reg,
                               inverse_weight_factor=inverse_weight_factor,
                               path_integration=path_integration,
                               alpha_path=alpha_path)[0][:DERIVED_TOP_K]


def _scored_transitions(active: Sequence[tuple[DynamicPattern, float]],
                        reg: PatternRegistry, *,
                        inverse_weight_factor: float = DEFAULT_INVERSE_WEIGHT,
                        path_integration: bool = False,
                        alpha_path: float = 0.30
                        ) -> tuple[list[TransitionCandidate], float]:
    pi = {p.name: w for p, w in active}
    candidates: list[TransitionCandidate] = []
    for (a, b) in sorted(reg.composition):
        if a not in pi and b not in pi:
            continue
        target = reg.composition[(a, b)]
        pi_a = pi.get(a, reg.patterns[a].confidence_prior * LATENT_PARTNER_DISCOUNT)
        pi_b = pi.get(b, reg.patterns[b].confidence_prior * LATENT_PARTNER_DISCOUNT)
        sim = lie_space.lie_similarity(reg.vector(a), reg.vector(b), reg.vector(target))
        if sim <= 0.0:
            continue
        raw = pi_a * pi_b * sim
        candidates.append(TransitionCandidate(
            source_a=a, source_b=b, target=target, kind="composition",
            pi_a=pi_a, pi_b=pi_b, lie_sim=sim, decay_factor=1.0,
            raw_weight=raw, adjusted_weight=raw, normalized_posterior=0.0))
    for name in sorted(pi):
        inverse = reg.inverses.get(name)
        if inverse is None or inverse in pi:
            continue
        raw = inverse_weight_factor * pi[name]
        candidates.append(TransitionCandidate(
            source_a=name, source_b=None, target=inverse, kind="inverse",
            pi_a=pi[name], pi_b=None, lie_sim=1.0, decay_factor=1.0,
            raw_weight=raw, adjusted_weight=raw, normalized_posterior=0.0))
    if path_integration:
        candidates = [adjust_path_consistency(c, reg, alpha_path) for c in candidates]
    z = sum(c.adjusted_weight for c in candidates)
    if z > 0:
        candidates = [dataclasses.replace(c, normalized_posterior=c.adjusted_weight / z)
                      for c in candidates]
    candidates.sort(key=lambda c: (-c.adjusted_weight, c.target, c.source_a, c.source_b or ""))
    return candidates, z


def compute_state(active: Sequence[tuple[DynamicPattern, float]]
                  ) -> tuple[np.ndarray, int, list[tuple[float, float]]]:
    """Stage 2c: weighted mean vector, dominant dimension, 2-D projection."""
    if not active:
        raise ValueError("active pattern set must be non-empty")
    vectors = [p.vector for p, _ in active]
    weights = [w for _, w in active]
    state = lie_space.weighted_mean(vectors, weights)
    return state, lie_space.dominant_dimension(state), lie_space.project_2d(vectors)


def aggregate_driving_factors(active: Sequence[tuple[DynamicPattern, float]]
                              ) -> list[tuple[str, float, list[str]]]:
    """Stage 2d: group by mechanism class; rank pooled outcomes by prior.

    Entirely deterministic: groups ordered by descending weight (name
    tie-break), outcomes ranked by owning pattern's prior then string order,
    top three kept per group.
    """
    groups: dict[str, float] = {}
    pooled: dict[str, list[tuple[float, str]]] = {}
    for pattern, weight in active:
        cls = pattern.mechanism_class
        groups[cls] = groups.get(cls, 0.0) + weight
        bucket = pooled.setdefault(cls, [])
        for outcome in pattern.typical_outcomes:
            bucket.append((-pattern.confidence_prior, outcome))
    out = []
    for cls in sorted(groups, key=lambda c: (-groups[c], c)):
        ranked: list[str] = []
        for _, outcome in sorted(pooled[cls]):
            if outcome not in ranked:
                ranked.append(outcome)
        out.append((cls, groups[cls], ranked[:3]))
    return out


def render_driving_statement(mechanism_class: str, weight: float, outcomes: Sequence[str],
                             templates: Mapping[str, str]) -> str:
    template = templates.get(mechanism_class, templates.get("generic",
                             "{mechanism} ({weight_pct}) points toward: {outcomes}."))
    return template.format(mechanism=mechanism_class.replace("_", " "),
                           weight_pct=f"{100.0 * weight:.0f}%",
                           outcomes="; ".join(outcomes))


def composite_confidence(active: Sequence[tuple[DynamicPattern, float]],
                         verifiability: float, kg_consistency: float) -> float:
    """Mean prior over active patterns, damped by evidence quality."""
    if not active:
        return 0.0
    mean_prior = sum(p.confidence_prior for p, _ in active) / len(active)
    return mean_prior * math.sqrt(verifiability * kg_consistency)


def _default_conclusion(report: AnalysisReport, template: str) -> str:
    alpha = report.alpha_path
    beta = report.beta_path
    dominant = lie_space.DIMENSIONS[report.dominant]
    alpha_text = ("no transition candidates" if alpha is None else
                  f"{alpha.target} (posterior {alpha.normalized_posterior:.3f})")
    beta_text = "none" if beta is None else (
        f"{beta.target} (posterior {beta.normalized_posterior:.3f})")
    if template:
        return template.format(alpha=alpha_text, beta=beta_text, dominant=dominant,
                               confidence=f"{report.composite_confidence:.3f}",
                               n_events=len(report.events),
                               n_patterns=len(report.active_patterns))
    return (f"Primary path: {alpha_text}. Secondary path: {beta_text}. "
            f"Dominant dimension: {dominant}. "
            f"Composite confidence {report.composite_confidence:.3f}.")


def build_conclusion(report: AnalysisReport, rules: PipelineRules,
                     writer: TextWriter | None = None) -> AnalysisReport:
    """Stage 3: finalize the report; the writer can only supply prose.

    The locked-field document is snapshotted before the writer runs and the
    writer gets a deep copy; any attempted mutation is detected by byte
    comparison, discarded, and logged. A writer failure falls back to the
    built-in template and never fails the pipeline.
    """
    snapshot = canonical.dumps(report.locked_document())
    text = None
    if writer is not None:
        handed = copy.deepcopy(report.locked_document())
        try:
            text = str(writer(handed))
        except Exception:
            logger.warning("external text writer failed; using template fallback",
                           exc_info=True)
            text = None
        if canonical.dumps(handed) != snapshot:
            logger.warning("external text writer attempted to mutate locked fields; "
                           "mutation discarded")
    if canonical.dumps(report.locked_document()) != snapshot:
        raise AssertionError("locked numeric fields changed during conclusion assembly")
    report.conclusion_text = text if text else _default_conclusion(
        report, rules.conclusion_template)
    return report


def run_analysis(text: str, reg: PatternRegistry,
                 rules: PipelineRules | None = None, *,
                 verifiability: float = 1.0,
                 kg_consistency: float = 1.0,
                 writer: TextWriter | None = None) -> AnalysisReport:
    """Run all five stages over a text and return the finished report."""
    rules = rules or load_rules()
    events = extract_events(text, rules.event_rules)
    active = activate_patterns(events, rules.domain_hints, reg)
    if active:
        all_candidates, partition = _scored_transitions(active, reg)
        derived = all_candidates[:DERIVED_TOP_K]
    else:
        derived, partition = [], 0.0
    if active:
        state, dominant, projection = compute_state(active)
    else:
        state, dominant, projection = np.zeros(lie_space.DIM), 0, []
    factors = aggregate_driving_factors(active)
    statements = [render_driving_statement(m, w, o, rules.templates)
                  for m, w, o in factors]
    report = AnalysisReport(
        events=events,
        active_patterns=list(active),
        derived=derived,
        state_vector=state,
        dominant=dominant,
        projection_2d=projection,
        driving_factors=factors,
        driving_statements=statements,
        alpha_path=derived[0] if derived else None,
        beta_path=derived[1] if len(derived) > 1 else None,
        composite_confidence=composite_confidence(active, verifiability, kg_consistency),
        verifiability=verifiability,
        kg_consistency=kg_consistency,
        partition=partition,
        domain_concentration=coupling_asymmetry(active) if active else 0.0,
    )
    return build_conclusion(report, rules, writer)
