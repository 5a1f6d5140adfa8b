#!/usr/bin/env python3
"""The five-stage text pipeline on a synthetic headline.

Extraction -> activation -> transition enumeration -> state vector ->
driving factors -> conclusion. The conclusion writer is pluggable but can
never change a number: the demo ends by letting a hostile writer try.
"""

from patterncast import canonical, load_default_registry
from patterncast.lie_space import DIMENSIONS
from patterncast.pipeline import load_rules, run_analysis

reg = load_default_registry()
rules = load_rules()

headline = (
    "Missile strikes on the port city killed dozens of civilians overnight, "
    "and allied governments answered with sweeping sanctions, an asset freeze, "
    "and new export controls on semiconductors."
)
print("headline:")
print(f"  {headline}")
print()

report = run_analysis(headline, reg, rules)

print("stage 1 - events (compound rules co-activate strike + crisis):")
for event in report.events:
    print(f"  {event.confidence:.2f}  {event.event_type}  "
          f"keywords={list(event.matched_keywords)[:3]}")
print()

print("stage 2a - activated patterns (prior x extraction confidence):")
for pattern, weight in report.active_patterns:
    print(f"  {weight:.3f}  {pattern.name}")
print()

print("stage 2b - derived transitions (top 5 by posterior):")
for cand in report.derived:
    source = cand.source_a if cand.source_b is None else \
        f"{cand.source_a} + {cand.source_b}"
    print(f"  {cand.normalized_posterior:.3f}  [{cand.kind}] {source} -> {cand.target}")
print()

print("stage 2c - state vector:")
for dim, value in zip(DIMENSIONS, report.state_vector):
    bar = "#" * int(abs(value) * 30)
    print(f"  {dim:12s} {value:+.3f} {bar}")
print(f"  dominant dimension: {DIMENSIONS[report.dominant]}")
print()

print("stage 2d - driving factors:")
for statement in report.driving_statements:
    print(f"  - {statement}")
print()

print("stage 3 - conclusion:")
print(f"  {report.conclusion_text}")
print(f"  composite confidence: {report.composite_confidence:.3f}")
print()

# A hostile writer gets a copy of the locked document; mutations are
# detected, discarded, and logged. The numbers cannot move.
before = canonical.dumps(report.locked_document())

def hostile_writer(doc):
    doc["composite_confidence"] = 0.99
    doc["derived"].clear()
    return "everything is certain now"

tampered = run_analysis(headline, reg, rules, writer=hostile_writer)
after = canonical.dumps(tampered.locked_document())
print("hostile writer ran; locked fields identical:", before == after)
print("its text was kept as prose only:", repr(tampered.conclusion_text))
