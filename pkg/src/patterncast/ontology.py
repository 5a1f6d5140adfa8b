"""Typed vocabulary, pattern registry, and algebraic consistency validators.

The registry is the declarative heart of the system: named dynamic
patterns keyed by (entity, relation, entity) triples, a partial binary
composition table over pattern names, and an involutive inverse table.
Two validators enforce the algebra at load time:

- ``validate_composition_closure``: every composition target must be a
  registered pattern, so iterating the operation can never leave the set.
- ``validate_inverses``: the inverse mapping must be symmetric, so the
  inverse of an inverse returns the original pattern.

A registry is immutable after ``load_registry`` returns and is safe for
unrestricted concurrent reads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np

from . import lie_space


class RegistryError(Exception):
    """Base class for registry loading problems."""


class RegistryParseError(RegistryError):
    """The registry document is malformed (bad structure, bad field values)."""


class RegistryValidationError(RegistryError):
    """An algebraic validator failed; ``violations`` lists offending entries."""

    def __init__(self, message: str, violations: list[str]):
        super().__init__(message + ": " + "; ".join(violations))
        self.violations = violations


class UnknownPatternError(RegistryError):
    """A pattern name does not resolve in the registry."""


class EntityType(Enum):
    STATE = "STATE"
    ALLIANCE = "ALLIANCE"
    PARAMILITARY = "PARAMILITARY"
    IDEOLOGY = "IDEOLOGY"
    FIRM = "FIRM"
    FINANCIAL_ORG = "FINANCIAL_ORG"
    RESOURCE = "RESOURCE"
    CURRENCY = "CURRENCY"
    SUPPLY_CHAIN = "SUPPLY_CHAIN"
    TECH = "TECH"
    STANDARD = "STANDARD"
    PERSON = "PERSON"
    MEDIA = "MEDIA"
    TRUST = "TRUST"
    INSTITUTION = "INSTITUTION"
    CONFLICT = "CONFLICT"
    NORM = "NORM"
    UNKNOWN = "UNKNOWN"

    @classmethod
    def parse(cls, raw: str) -> "EntityType":
        """Closed-set parse; anything unrecognized collapses to UNKNOWN."""
        try:
            return cls(raw.strip().upper())
        except ValueError:
            return cls.UNKNOWN


class RelationType(Enum):
    SANCTION = "SANCTION"
    MILITARY_STRIKE = "MILITARY_STRIKE"
    COERCE = "COERCE"
    BLOCKADE = "BLOCKADE"
    SUPPORT = "SUPPORT"
    ALLY = "ALLY"
    AID = "AID"
    AGREE = "AGREE"
    DEPENDENCY = "DEPENDENCY"
    TRADE_FLOW = "TRADE_FLOW"
    SUPPLY = "SUPPLY"
    FINANCE = "FINANCE"
    SIGNAL = "SIGNAL"
    PROPAGANDA = "PROPAGANDA"
    LEGITIMIZE = "LEGITIMIZE"
    DELEGITIMIZE = "DELEGITIMIZE"
    REGULATE = "REGULATE"
    STANDARDIZE = "STANDARDIZE"
    EXCLUDE = "EXCLUDE"
    INTEGRATE = "INTEGRATE"

    @classmethod
    def parse(cls, raw: str) -> "RelationType":
        """Strict closed-set parse; unknown relations are a document error."""
        try:
            return cls(raw.strip().upper())
        except ValueError:
            raise RegistryParseError(f"unknown relation type: {raw!r}") from None


#: Each relation belongs to exactly one behavioral category.
RELATION_CATEGORIES: dict[str, frozenset[RelationType]] = {
    "coercive": frozenset({RelationType.SANCTION, RelationType.MILITARY_STRIKE,
                           RelationType.COERCE, RelationType.BLOCKADE}),
    "cooperative": frozenset({RelationType.SUPPORT, RelationType.ALLY,
                              RelationType.AID, RelationType.AGREE}),
    "dependency_flow": frozenset({RelationType.DEPENDENCY, RelationType.TRADE_FLOW,
                                  RelationType.SUPPLY, RelationType.FINANCE}),
    "structural": frozenset({RelationType.SIGNAL, RelationType.PROPAGANDA,
                             RelationType.LEGITIMIZE, RelationType.DELEGITIMIZE,
                             RelationType.REGULATE, RelationType.STANDARDIZE,
                             RelationType.EXCLUDE, RelationType.INTEGRATE}),
}


class Domain(Enum):
    GEOPOLITICS = "geopolitics"
    ECONOMICS = "economics"
    TECHNOLOGY = "technology"
    INFORMATION = "information"
    MILITARY = "military"
    SOCIAL = "social"
    INSTITUTIONAL = "institutional"
    ENVIRONMENTAL = "environmental"

    @classmethod
    def parse(cls, raw: str) -> "Domain":
        try:
            return cls(raw.strip().lower())
        except ValueError:
            raise RegistryParseError(f"unknown semantic domain: {raw!r}") from None


#: Fixed baseline for the coupling-asymmetry concentration metric.
DOMAIN_COUNT = len(Domain)


@dataclass(frozen=True)
class DynamicPattern:
    """A named relationship template with its prior, vector, and metadata."""

    name: str
    entity_src: EntityType
    relation: RelationType
    entity_tgt: EntityType
    domain: Domain
    typical_outcomes: tuple[str, ...]
    mechanism_class: str
    confidence_prior: float
    vector: np.ndarray
    inverse_pattern: str | None = None
    composition_hints: tuple[str, ...] = ()
    provenance: str = "completed"

    def triple(self) -> tuple[EntityType, RelationType, EntityType]:
        return (self.entity_src, self.relation, self.entity_tgt)


@dataclass(frozen=True)
class ValidationReport:
    check: str
    passed: bool
    violations: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.passed


@dataclass(frozen=True)
class NamedScenario:
    name: str
    initial_patterns: tuple[str, ...]
    description: str = ""


@dataclass(frozen=True)
class PatternRegistry:
    """Immutable bundle of patterns, composition table, and inverse table."""

    patterns: Mapping[str, DynamicPattern]
    triple_index: Mapping[tuple[EntityType, RelationType, EntityType], str]
    composition: Mapping[tuple[str, str], str]
    inverses: Mapping[str, str]
    scenarios: Mapping[str, NamedScenario] = field(default_factory=dict)
    composition_provenance: Mapping[tuple[str, str], str] = field(default_factory=dict)
    source_document: Mapping[str, Any] = field(default_factory=dict)

    def pattern(self, name: str) -> DynamicPattern:
        try:
            return self.patterns[name]
        except KeyError:
            raise UnknownPatternError(f"unknown pattern name: {name!r}") from None

    def vector(self, name: str) -> np.ndarray:
        return self.pattern(name).vector


DEFAULT_REGISTRY_PATH = Path(__file__).parent / "data" / "registry.json"


def validate_inverses(reg: PatternRegistry) -> ValidationReport:
    """PASS iff the inverse mapping is symmetric: A -> B implies B -> A."""
    violations = []
    for a, b in sorted(reg.inverses.items()):
        if reg.inverses.get(b) != a:
            violations.append(f"({a}, {b})")
    return ValidationReport("inverse_symmetry", not violations, tuple(violations))


def validate_composition_closure(reg: PatternRegistry) -> ValidationReport:
    """PASS iff every composition target is a registered pattern name."""
    violations = []
    for (a, b), c in sorted(reg.composition.items()):
        if c not in reg.patterns:
            violations.append(f"(({a}, {b}), {c})")
    return ValidationReport("composition_closure", not violations, tuple(violations))


def compose(reg: PatternRegistry, a: str, b: str) -> str | None:
    """The partial binary operation; None marks an undefined composition.

    Lookup is order-sensitive: (a, b) and (b, a) are distinct keys.
    """
    if a not in reg.patterns:
        raise UnknownPatternError(f"unknown pattern name: {a!r}")
    if b not in reg.patterns:
        raise UnknownPatternError(f"unknown pattern name: {b!r}")
    return reg.composition.get((a, b))


def _lcs_length(a: str, b: str) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for ca in a:
        curr = [0]
        for j, cb in enumerate(b, start=1):
            if ca == cb:
                curr.append(prev[j - 1] + 1)
            else:
                curr.append(max(prev[j], curr[-1]))
        prev = curr
    return prev[-1]


def lcs_ratio(a: str, b: str) -> float:
    """Longest-common-subsequence ratio over lowercased strings, in [0, 1]."""
    a = a.strip().lower()
    b = b.strip().lower()
    if not a and not b:
        return 1.0
    if not a or not b:
        return 0.0
    return 2.0 * _lcs_length(a, b) / (len(a) + len(b))


FUZZY_MATCH_THRESHOLD = 0.4


def lookup_pattern_by_strings(reg: PatternRegistry, src: str, rel: str,
                              tgt: str) -> tuple[DynamicPattern, float] | None:
    """Resolve a raw string triple to a registered pattern.

    Exact triple matches score 1.0. Otherwise every pattern is scored by
    the mean of per-component LCS ratios (source, relation, target) and
    the best candidate at or above 0.4 wins, ties broken by pattern name.
    """
    exact = (EntityType.parse(src), None, EntityType.parse(tgt))
    try:
        relation = RelationType.parse(rel)
    except RegistryParseError:
        relation = None
    if relation is not None:
        key = (exact[0], relation, exact[2])
        hit = reg.triple_index.get(key)
        if hit is not None:
            return reg.patterns[hit], 1.0

    best: tuple[float, str] | None = None
    for name in sorted(reg.patterns):
        p = reg.patterns[name]
        score = (lcs_ratio(src, p.entity_src.value)
                 + lcs_ratio(rel, p.relation.value)
                 + lcs_ratio(tgt, p.entity_tgt.value)) / 3.0
        if best is None or score > best[0]:
            best = (score, name)
    if best is None or best[0] < FUZZY_MATCH_THRESHOLD:
        return None
    return reg.patterns[best[1]], best[0]


def coupling_asymmetry(active: Sequence[tuple[DynamicPattern, float]]) -> float:
    """Concentration of active weight across the eight semantic domains.

    Herfindahl-Hirschman index of per-domain weight shares, normalised
    against the fixed 1/8 uniform baseline and clamped to [0, 1]. Invariant
    under uniform scaling of the weights.
    """
    if any(w < 0 for _, w in active):
        raise ValueError("weights must be non-negative")
    total = sum(w for _, w in active)
    if total <= 0:
        raise ValueError("at least one weight must be positive")
    shares: dict[Domain, float] = {}
    for pattern, w in active:
        shares[pattern.domain] = shares.get(pattern.domain, 0.0) + w / total
    hhi = sum(s * s for s in shares.values())
    baseline = 1.0 / DOMAIN_COUNT
    value = (hhi - baseline) / (1.0 - baseline)
    return max(0.0, min(1.0, value))


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise RegistryParseError(message)


def _parse_pattern(entry: Mapping[str, Any], vectors: Mapping[str, Any]) -> DynamicPattern:
    _require(isinstance(entry, Mapping), "pattern entry must be an object")
    name = entry.get("name")
    _require(isinstance(name, str) and bool(name), "pattern entry missing name")
    prior = entry.get("confidence_prior")
    _require(isinstance(prior, (int, float)), f"pattern {name!r}: confidence_prior must be a number")
    _require(0.0 < float(prior) <= 1.0, f"pattern {name!r}: confidence_prior must lie in (0, 1]")
    raw_vec = vectors.get(name)
    _require(raw_vec is not None, f"pattern {name!r}: no vector entry")
    try:
        vec = lie_space.as_vector(raw_vec)
    except ValueError as exc:
        raise RegistryParseError(f"pattern {name!r}: {exc}") from None
    _require(bool(np.all(np.abs(vec) <= 1.0)),
             f"pattern {name!r}: vector components must lie in [-1, 1]")
    outcomes = entry.get("typical_outcomes", [])
    _require(isinstance(outcomes, list) and all(isinstance(o, str) for o in outcomes),
             f"pattern {name!r}: typical_outcomes must be a list of strings")
    hints = entry.get("composition_hints", [])
    _require(isinstance(hints, list) and all(isinstance(h, str) for h in hints),
             f"pattern {name!r}: composition_hints must be a list of strings")
    inverse = entry.get("inverse_pattern")
    _require(inverse is None or isinstance(inverse, str),
             f"pattern {name!r}: inverse_pattern must be a string when present")
    vec.setflags(write=False)
    return DynamicPattern(
        name=name,
        entity_src=EntityType.parse(str(entry.get("entity_src", "UNKNOWN"))),
        relation=RelationType.parse(str(entry.get("relation", ""))),
        entity_tgt=EntityType.parse(str(entry.get("entity_tgt", "UNKNOWN"))),
        domain=Domain.parse(str(entry.get("domain", ""))),
        typical_outcomes=tuple(outcomes),
        mechanism_class=str(entry.get("mechanism_class", "")),
        confidence_prior=float(prior),
        vector=vec,
        inverse_pattern=inverse,
        composition_hints=tuple(hints),
        provenance=str(entry.get("provenance", "completed")),
    )


def load_registry(source: str | Path | Mapping[str, Any]) -> PatternRegistry:
    """Load and validate a registry document (path or already-parsed object).

    The document carries sections ``patterns``, ``composition_table`` (array
    of [A, B, C] triples), ``inverse_table`` (array of [A, B] pairs),
    ``vectors`` (name -> 8 reals), and ``scenarios``. Both algebraic
    validators run before the registry is returned; violations raise
    ``RegistryValidationError`` naming every offending entry.
    """
    if isinstance(source, (str, Path)):
        try:
            doc = json.loads(Path(source).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise RegistryParseError(f"registry document is not valid JSON: {exc}") from None
    else:
        doc = source
    _require(isinstance(doc, Mapping), "registry document must be an object")

    vectors = doc.get("vectors", {})
    _require(isinstance(vectors, Mapping), "vectors section must be an object")
    raw_patterns = doc.get("patterns", [])
    _require(isinstance(raw_patterns, list), "patterns section must be an array")

    patterns: dict[str, DynamicPattern] = {}
    triple_index: dict[tuple[EntityType, RelationType, EntityType], str] = {}
    for entry in raw_patterns:
        p = _parse_pattern(entry, vectors)
        _require(p.name not in patterns, f"duplicate pattern name: {p.name!r}")
        patterns[p.name] = p
        triple_index.setdefault(p.triple(), p.name)

    raw_inverses = doc.get("inverse_table", [])
    _require(isinstance(raw_inverses, list), "inverse_table section must be an array")
    inverses: dict[str, str] = {}
    for row in raw_inverses:
        _require(isinstance(row, list) and len(row) == 2
                 and all(isinstance(x, str) for x in row),
                 f"inverse_table rows must be [A, B] string pairs, got {row!r}")
        a, b = row
        _require(a not in inverses, f"duplicate inverse entry for {a!r}")
        inverses[a] = b

    raw_comp = doc.get("composition_table", [])
    _require(isinstance(raw_comp, list), "composition_table section must be an array")
    composition: dict[tuple[str, str], str] = {}
    comp_provenance: dict[tuple[str, str], str] = {}
    for row in raw_comp:
        _require(isinstance(row, list) and len(row) in (3, 4)
                 and all(isinstance(x, str) for x in row[:3]),
                 f"composition_table rows must be [A, B, C] string triples, got {row!r}")
        a, b, c = row[0], row[1], row[2]
        _require(a in patterns, f"composition rule ({a!r}, {b!r}) names unknown source {a!r}")
        _require(b in patterns, f"composition rule ({a!r}, {b!r}) names unknown source {b!r}")
        _require((a, b) not in composition, f"duplicate composition rule for ({a!r}, {b!r})")
        composition[(a, b)] = c
        comp_provenance[(a, b)] = row[3] if len(row) == 4 else "completed"

    # Patterns may declare their inverse inline; it must agree with the table.
    for name, p in patterns.items():
        table_inv = inverses.get(name)
        if p.inverse_pattern is not None:
            _require(p.inverse_pattern in patterns,
                     f"pattern {name!r}: inverse_pattern {p.inverse_pattern!r} is not registered")
            _require(table_inv is None or table_inv == p.inverse_pattern,
                     f"pattern {name!r}: inverse_pattern disagrees with inverse_table")
        elif table_inv is not None and table_inv in patterns:
            patterns[name] = DynamicPattern(
                **{**p.__dict__, "inverse_pattern": table_inv})

    raw_scenarios = doc.get("scenarios", {})
    _require(isinstance(raw_scenarios, Mapping), "scenarios section must be an object")
    scenarios: dict[str, NamedScenario] = {}
    for sname, body in raw_scenarios.items():
        if isinstance(body, list):
            initial, description = body, ""
        else:
            _require(isinstance(body, Mapping), f"scenario {sname!r} must be a list or object")
            initial = body.get("initial_patterns", [])
            description = str(body.get("description", ""))
        _require(isinstance(initial, list) and all(isinstance(x, str) for x in initial),
                 f"scenario {sname!r}: initial_patterns must be a list of strings")
        for pname in initial:
            _require(pname in patterns,
                     f"scenario {sname!r} references unknown pattern {pname!r}")
        scenarios[sname] = NamedScenario(sname, tuple(initial), description)

    reg = PatternRegistry(
        patterns=patterns,
        triple_index=triple_index,
        composition=composition,
        inverses=inverses,
        scenarios=scenarios,
        composition_provenance=comp_provenance,
        source_document=doc,
    )

    problems: list[str] = []
    for report in (validate_composition_closure(reg), validate_inverses(reg)):
        if not report.passed:
            problems.extend(f"{report.check}: {v}" for v in report.violations)
    for name, inv in sorted(reg.inverses.items()):
        if name not in patterns:
            problems.append(f"inverse_table: unknown pattern {name!r}")
        if inv not in patterns:
            problems.append(f"inverse_table: ({name}, {inv}) targets unregistered {inv!r}")
    if problems:
        raise RegistryValidationError("registry failed algebraic validation", problems)
    return reg


def load_default_registry() -> PatternRegistry:
    """Load the registry document shipped with the package."""
    return load_registry(DEFAULT_REGISTRY_PATH)
