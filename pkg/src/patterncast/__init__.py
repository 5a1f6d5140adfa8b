"""patterncast: deterministic trajectory forecasting over a pattern semigroup.

Public surface re-exported here: the ontology registry and validators, the
8-D vector-space operations, the forward simulator, and the five-stage
text-analysis pipeline.
"""

from .ontology import (
    Domain,
    DynamicPattern,
    EntityType,
    NamedScenario,
    PatternRegistry,
    RegistryError,
    RegistryParseError,
    RegistryValidationError,
    RelationType,
    UnknownPatternError,
    ValidationReport,
    compose,
    coupling_asymmetry,
    load_default_registry,
    load_registry,
    lookup_pattern_by_strings,
    validate_composition_closure,
    validate_inverses,
)
from .lie_space import (
    DIMENSIONS,
    bracket,
    dominant_dimension,
    hat,
    lie_similarity,
    path_independence,
    path_independence_info,
    phase_detect,
    project_2d,
)
from .forecaster import (
    ForecastResult,
    SimulationConfig,
    StepState,
    TransitionCandidate,
    adjust_path_consistency,
    attractor_set,
    confidence,
    detect_bifurcation,
    simulate,
)

__version__ = "0.1.0"

__all__ = [
    "Domain", "DynamicPattern", "EntityType", "NamedScenario", "PatternRegistry",
    "RegistryError", "RegistryParseError", "RegistryValidationError", "RelationType",
    "UnknownPatternError", "ValidationReport", "compose", "coupling_asymmetry",
    "load_default_registry", "load_registry", "lookup_pattern_by_strings",
    "validate_composition_closure", "validate_inverses",
    "DIMENSIONS", "bracket", "dominant_dimension", "hat", "lie_similarity",
    "path_independence", "path_independence_info", "phase_detect", "project_2d",
    "ForecastResult", "SimulationConfig", "StepState", "TransitionCandidate",
    "adjust_path_consistency", "attractor_set", "confidence", "detect_bifurcation",
    "simulate",
    "__version__",
]
