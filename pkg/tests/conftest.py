import pytest

from patterncast import load_default_registry
from patterncast.ontology import load_registry
from patterncast.pipeline import load_rules


@pytest.fixture(scope="session")
def registry():
    return load_default_registry()


@pytest.fixture(scope="session")
def rules():
    return load_rules()


def build_registry_doc(priors: dict[str, float],
                       composition: list[tuple[str, str, str]] = (),
                       inverses: list[tuple[str, str]] = (),
                       vectors: dict[str, list[float]] | None = None,
                       scenarios: dict | None = None) -> dict:
    """Synthetic registry document for small algebra tests.

    Default vectors are distinct, strictly positive profiles so every
    composition has positive lie similarity and reachability is purely
    table-driven.
    """
    names = sorted(priors)
    vectors = dict(vectors or {})
    for i, name in enumerate(names):
        if name not in vectors:
            base = [0.2] * 8
            base[i % 8] = 0.9
            base[(i + 3) % 8] = 0.5
            vectors[name] = base
    return {
        "patterns": [
            {
                "name": name,
                "entity_src": "STATE",
                "relation": "SIGNAL",
                "entity_tgt": "STATE",
                "domain": "geopolitics",
                "mechanism_class": "synthetic",
                "confidence_prior": priors[name],
                "typical_outcomes": [f"outcome of {name}"],
            }
            for name in names
        ],
        "composition_table": [[a, b, c] for a, b, c in composition],
        "inverse_table": [[a, b] for a, b in inverses],
        "vectors": vectors,
        "scenarios": scenarios or {},
    }


def build_registry(priors, composition=(), inverses=(), vectors=None, scenarios=None):
    return load_registry(build_registry_doc(priors, composition, inverses,
                                            vectors, scenarios))
