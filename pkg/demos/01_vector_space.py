#!/usr/bin/env python3
"""Tour of the 8-dimensional semantic vector space.

Walks through the hat-map embedding, the commutator bracket, lie
similarity, and the path-independence diagnostic on the shipped pattern
vectors.
"""

import numpy as np

from patterncast import load_default_registry
from patterncast.lie_space import (
    DIMENSIONS,
    bracket,
    hat,
    lie_similarity,
    path_independence_info,
)

np.set_printoptions(precision=3, suppress=True)

reg = load_default_registry()

print("Semantic dimensions:", ", ".join(DIMENSIONS))
print()

# Every pattern vector embeds as a skew-symmetric matrix: entry (i, j)
# holds v[i] - v[j], so the diagonal is zero and the matrix is exactly
# antisymmetric.
hs = reg.vector("Hegemonic Sanctions")
print("Hegemonic Sanctions vector:", hs)
X = hat(hs)
print("hat embedding (top-left 4x4 block):")
print(X[:4, :4])
print("max |X + X^T| =", np.abs(X + X.T).max(), "(exactly skew)")
print()

# The bracket measures whether activation ORDER matters. Proportional
# vectors commute; genuinely different postures do not.
fma = reg.vector("Formal Military Alliance")
B = bracket(hat(hs), hat(fma))
print("bracket(sanctions, alliance) Frobenius norm:",
      round(float(np.linalg.norm(B)), 4))
print("bracket(sanctions, 0.5 * sanctions) Frobenius norm:",
      round(float(np.linalg.norm(bracket(hat(hs), hat(0.5 * hs)))), 4))
print()

# Lie similarity scores a composition rule: how close is the sum of the
# two source vectors to the target's direction?
mas = reg.vector("Multilateral Alliance Sanctions")
print("lie_similarity(sanctions + alliance -> multilateral sanctions):",
      round(lie_similarity(hs, fma, mas), 4))

ranked = sorted(((lie_similarity(hs, fma, reg.vector(name)), name)
                 for name in reg.patterns), reverse=True)
print("best targets for sanctions + alliance:")
for sim, name in ranked[:3]:
    print(f"  {sim:+.4f}  {name}")
print()

# The path-independence diagnostic separates the additive regime (the
# bracket reinforces the vector sum) from the emergence regime (the
# bracket activates dimensions the sum misses).
delta, commuting = path_independence_info(hs, fma)
print(f"path independence delta(sanctions, alliance) = {delta:.4f} "
      f"(commuting={commuting})")
delta, commuting = path_independence_info(hs, 2.0 * hs)
print(f"path independence delta(sanctions, scaled sanctions) = {delta:.4f} "
      f"(commuting={commuting})")
