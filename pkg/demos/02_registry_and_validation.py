#!/usr/bin/env python3
"""The pattern registry: vocabulary, composition algebra, validators.

Shows what the shipped registry contains, how the two startup validators
react to corrupted documents, and how raw strings resolve to patterns.
"""

import copy
import json

from patterncast import (
    RegistryValidationError,
    compose,
    coupling_asymmetry,
    load_default_registry,
    load_registry,
    lookup_pattern_by_strings,
    validate_composition_closure,
    validate_inverses,
)
from patterncast.ontology import DEFAULT_REGISTRY_PATH

reg = load_default_registry()

print(f"{len(reg.patterns)} patterns, {len(reg.composition)} composition rules, "
      f"{len(reg.inverses)} inverse entries")
print()
print("patterns by domain:")
by_domain: dict = {}
for p in reg.patterns.values():
    by_domain.setdefault(p.domain.value, []).append(p)
for domain in sorted(by_domain):
    print(f"  {domain}:")
    for p in sorted(by_domain[domain], key=lambda q: q.name):
        print(f"    {p.name}  (prior {p.confidence_prior}, {p.provenance})")
print()

# The composition table is a partial operation: most pairs are undefined.
a, b = "Hegemonic Sanctions", "Formal Military Alliance"
print(f"compose({a!r}, {b!r}) = {compose(reg, a, b)!r}")
print(f"compose({b!r}, {a!r}) = {compose(reg, b, a)!r}  (order-sensitive)")
print()

# Both validators run inside load_registry; corrupting the document makes
# loading fail with the offending entry named.
print("validators on the shipped registry:",
      validate_inverses(reg).passed and validate_composition_closure(reg).passed)

doc = json.loads(DEFAULT_REGISTRY_PATH.read_text())
broken = copy.deepcopy(doc)
broken["composition_table"][0][2] = "Phantom Pattern"
try:
    load_registry(broken)
except RegistryValidationError as exc:
    print("retargeted rule rejected:", exc)

broken = copy.deepcopy(doc)
del broken["inverse_table"][0]
try:
    load_registry(broken)
except RegistryValidationError as exc:
    print("dropped inverse rejected: ", exc)
print()

# Raw string triples resolve exactly or fuzzily (threshold 0.4).
for triple in (("STATE", "SANCTION", "STATE"),
               ("states", "sanctions", "state"),
               ("XYZZY", "QQQ", "WWW")):
    hit = lookup_pattern_by_strings(reg, *triple)
    if hit is None:
        print(f"{triple} -> not found")
    else:
        print(f"{triple} -> {hit[0].name} (score {hit[1]:.3f})")
print()

# Coupling asymmetry: concentration of active weight over the 8 domains.
active = [(reg.patterns["Hegemonic Sanctions"], 0.5),
          (reg.patterns["Entity-List Technology Blockade"], 0.3),
          (reg.patterns["Bilateral Trade Dependency"], 0.2)]
print("coupling asymmetry of a geopolitics/technology/economics mix:",
      round(coupling_asymmetry(active), 4))
print("coupling asymmetry, all weight on one domain:",
      coupling_asymmetry([(reg.patterns["Hegemonic Sanctions"], 1.0)]))
