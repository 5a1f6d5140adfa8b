"""8-dimensional semantic vector space for dynamic patterns.

Every registered pattern carries a vector over eight semantic dimensions
(coercion, cooperation, dependency, information, regulation, military,
economic, technology). This module provides the geometric machinery built
on top of those vectors:

- ``hat``: embed a vector as a skew-symmetric 8x8 matrix,
  ``hat(v)[i, j] = v[i] - v[j]``, equivalently ``v 1^T - 1 v^T``.
- ``bracket``: the matrix commutator ``X Y - Y X``. Its Frobenius norm is
  zero exactly when the two embeddings commute, i.e. when activation
  order is immaterial.
- ``lie_similarity``: cosine of the sum of two source vectors against a
  target vector; the continuous plausibility score of a composition rule.
- ``path_independence``: the diagnostic ``1 - |cos(v_a + v_b, eta)``|
  where ``eta`` holds the row norms of the bracket; low values mean the
  commutator reinforces the additive direction (redundant paths), high
  values mean it activates dimensions absent from the sum.
- ``phase_detect`` / ``project_2d`` / ``dominant_dimension``: state-vector
  shift detection and presentation helpers.

All functions are pure, operate on float64, and are safe for concurrent
use.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

#: Semantic dimension names, in component order.
DIMENSIONS = (
    "coercion",
    "cooperation",
    "dependency",
    "information",
    "regulation",
    "military",
    "economic",
    "technology",
)

DIM = len(DIMENSIONS)

#: Cosine with a zero-norm argument is undefined; we return this neutral
#: value and mark the computation degenerate.
DEGENERATE_COSINE = 0.0

#: Path-independence value reported when the sources commute (eta = 0).
COMMUTING_DELTA = 1.0

_ZERO_NORM_EPS = 1e-12


def as_vector(values: Iterable[float]) -> np.ndarray:
    """Coerce to a float64 vector of length 8, rejecting bad shapes."""
    v = np.asarray(list(values) if not isinstance(values, np.ndarray) else values,
                   dtype=np.float64)
    if v.shape != (DIM,):
        raise ValueError(f"pattern vector must have {DIM} components, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("pattern vector components must be finite")
    return v


def hat(v: np.ndarray) -> np.ndarray:
    """Embed ``v`` as the skew-symmetric matrix with entries ``v[i] - v[j]``.

    The diagonal is exactly zero and ``hat(v).T == -hat(v)`` holds bit-exactly;
    the kernel of the map is the span of the all-ones vector.
    """
    v = np.asarray(v, dtype=np.float64)
    return np.subtract.outer(v, v)


def bracket(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Matrix commutator ``x @ y - y @ x``; skew-symmetric for skew inputs."""
    return x @ y - y @ x


def row_norms(m: np.ndarray) -> np.ndarray:
    """Euclidean norm of each row; the emergence vector of a bracket."""
    return np.sqrt(np.sum(m * m, axis=1))


def cosine(u: np.ndarray, v: np.ndarray) -> tuple[float, bool]:
    """Cosine of two vectors, clamped to [-1, 1].

    Returns ``(value, degenerate)``; a zero-norm argument yields the
    neutral value 0.0 with ``degenerate=True``.
    """
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu <= _ZERO_NORM_EPS or nv <= _ZERO_NORM_EPS:
        return DEGENERATE_COSINE, True
    c = float(np.dot(u, v) / (nu * nv))
    return max(-1.0, min(1.0, c)), False


def lie_similarity(va: np.ndarray, vb: np.ndarray, vc: np.ndarray) -> float:
    """Cosine of ``va + vb`` against ``vc``; 0.0 on zero-norm inputs."""
    value, _ = cosine(np.asarray(va, dtype=np.float64) + np.asarray(vb, dtype=np.float64), vc)
    return value


def emergence_vector(va: np.ndarray, vb: np.ndarray) -> np.ndarray:
    """Row norms of the bracket of the two hat embeddings."""
    return row_norms(bracket(hat(va), hat(vb)))


def path_independence_info(va: np.ndarray, vb: np.ndarray) -> tuple[float, bool]:
    """Path-independence diagnostic with its degeneracy flag.

    delta = 1 - |cos(va + vb, eta)| in [0, 1]. When the embeddings commute
    (eta = 0) the cosine is undefined; the formula limit 1.0 is reported
    with ``commuting=True`` so consumers can tell the cases apart.
    """
    eta = emergence_vector(va, vb)
    total = np.asarray(va, dtype=np.float64) + np.asarray(vb, dtype=np.float64)
    c, degenerate = cosine(total, eta)
    if degenerate:
        return COMMUTING_DELTA, True
    return 1.0 - abs(c), False


def path_independence(va: np.ndarray, vb: np.ndarray) -> float:
    """Path-independence diagnostic in [0, 1] (see ``path_independence_info``)."""
    delta, _ = path_independence_info(va, vb)
    return delta


def consistency_alignment(va: np.ndarray, vb: np.ndarray,
                          v_target: np.ndarray) -> tuple[float, bool]:
    """Cosine of the emergence vector against the target vector.

    Feeds the path-consistency weight adjustment. Commuting sources give a
    neutral 0.0 with the degenerate flag set.
    """
    eta = emergence_vector(va, vb)
    c, degenerate = cosine(eta, v_target)
    if degenerate:
        return 0.0, True
    return c, False


def phase_detect(v_prev: np.ndarray, v_curr: np.ndarray, theta: float = 0.25) -> bool:
    """True iff the state vector moved strictly more than ``theta`` in L2 norm."""
    if theta <= 0:
        raise ValueError("theta must be positive")
    shift = float(np.linalg.norm(np.asarray(v_curr, dtype=np.float64)
                                 - np.asarray(v_prev, dtype=np.float64)))
    return shift > theta


def dominant_dimension(v: np.ndarray) -> int:
    """Index of the largest-magnitude component; ties go to the lowest index."""
    return int(np.argmax(np.abs(np.asarray(v, dtype=np.float64))))


def project_2d(points: Sequence[np.ndarray]) -> list[tuple[float, float]]:
    """Project points onto their top-2 principal directions.

    Uses the singular value decomposition of the mean-centered data matrix.
    Directions whose singular value is negligible relative to the largest
    contribute a zero coordinate, so a single point maps to (0, 0) and two
    points map to a symmetric pair on one axis. Each principal direction is
    oriented so that its largest-magnitude loading is positive, making the
    output reproducible across runs.
    """
    if len(points) == 0:
        raise ValueError("project_2d requires at least one point")
    data = np.stack([as_vector(p) for p in points])
    centered = data - data.mean(axis=0)
    u, s, vt = np.linalg.svd(centered, full_matrices=False)
    coords = np.zeros((len(points), 2), dtype=np.float64)
    if s.size and s[0] > _ZERO_NORM_EPS:
        for k in range(min(2, s.size)):
            if s[k] <= 1e-9 * s[0]:
                continue
            direction = vt[k]
            lead = int(np.argmax(np.abs(direction)))
            if direction[lead] < 0:
                direction = -direction
            coords[:, k] = centered @ direction
    return [(float(x), float(y)) for x, y in coords]


def weighted_mean(vectors: Sequence[np.ndarray], weights: Sequence[float]) -> np.ndarray:
    """State vector: the weight-scaled sum of pattern vectors."""
    if len(vectors) != len(weights) or not vectors:
        raise ValueError("vectors and weights must be equal-length and non-empty")
    out = np.zeros(DIM, dtype=np.float64)
    for v, w in zip(vectors, weights):
        out += float(w) * as_vector(v)
    return out


def norm(v: np.ndarray) -> float:
    return float(np.linalg.norm(np.asarray(v, dtype=np.float64)))


def frobenius(m: np.ndarray) -> float:
    return float(math.sqrt(np.sum(np.asarray(m, dtype=np.float64) ** 2)))
