#!/usr/bin/env python3
"""Forward simulation of the named scenario library.

Reproduces the headline results: every scenario converges to a small
attractor set within the six-step horizon, with bifurcation points marking
steps where the top two candidates are nearly tied.
"""

from patterncast import SimulationConfig, load_default_registry, simulate

reg = load_default_registry()
cfg = SimulationConfig()  # horizon 6, decay 0.85, theta 0.25, delta 0.15

named = [name for name in sorted(reg.scenarios)
         if not reg.scenarios[name].description.endswith("tests.")
         and "baseline" not in reg.scenarios[name].description]

print(f"{'scenario':36s} {'primary attractor':42s} {'P(a)':>6s} "
      f"{'bifurcation':>12s} {'c_final':>8s}")
print("-" * 110)
for name in named:
    result = simulate(reg, reg.scenarios[name].initial_patterns, cfg)
    posterior = dict(result.attractors)[result.primary]
    bif = f"step {result.bifurcation_points[0]}" if result.bifurcation_points else "no"
    print(f"{name:36s} {result.primary:42s} {posterior:6.2f} "
          f"{bif:>12s} {result.c_final:8.2f}")

print()
print("=== step-by-step view: china_taiwan_military_coercion ===")
result = simulate(reg, reg.scenarios["china_taiwan_military_coercion"].initial_patterns, cfg)
for step in result.steps:
    flags = []
    if step.bifurcation:
        flags.append("bifurcation")
    if step.phase_transition:
        flags.append("phase shift")
    top = sorted(step.active.items(), key=lambda kv: (-kv[1], kv[0]))[:4]
    print(f"step {step.step} {('[' + ', '.join(flags) + ']') if flags else ''}")
    for pattern, weight in top:
        print(f"   {weight:.3f}  {pattern}")
    if step.new_patterns:
        print(f"   entered: {', '.join(step.new_patterns)}")

print()
print("Low-weight reversal paths stay visible in the trace:")
for step in result.steps:
    for cand in step.fired:
        if cand.kind == "inverse":
            print(f"  step {step.step}: {cand.source_a} -> {cand.target} "
                  f"(posterior {cand.normalized_posterior:.3f})")
