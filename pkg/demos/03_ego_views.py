"""
Egocentric view derivation
==========================

Derives the three interface conditions for one user node and shows what
each adds: neighbor highlighting, incident-edge removal, sphere placement,
and edge clipping. Also demonstrates geodesic coloring and morphing.
"""

import numpy as np

from egograph import (
    GeneratorParams,
    ViewCondition,
    apply_condition,
    degree,
    generate_ba,
    geodesic_color,
    geodesic_distances,
    morph,
    run_layout,
)
from egograph.layout import LayoutParams

g = generate_ba(GeneratorParams(n=165, m=2, seed=0))
positions = run_layout(g, LayoutParams(seed=0))
user = max(g.nodes, key=lambda v: degree(g, v))  # stand on the biggest hub
print(f"user node {user} with {degree(g, user)} neighbors")

baseline = apply_condition(g, positions, ViewCondition.BASELINE)
print("baseline: nothing adapted ->", len(baseline.highlight_set), "highlights,",
      len(baseline.hidden_edges), "hidden edges")

highlight = apply_condition(g, positions, ViewCondition.HIGHLIGHT, user)
print(f"highlight: {len(highlight.highlight_set)} neighbors haloed, "
      f"{len(highlight.hidden_edges)} user-incident edges hidden")

bubble = apply_condition(g, positions, ViewCondition.BUBBLE, user)
radii = [np.linalg.norm(p - positions[user]) for p in bubble.displaced_positions.values()]
print(f"bubble: {len(bubble.displaced_positions)} neighbors moved onto a "
      f"radius-{bubble.bubble_radius:.1f} sphere (spread {min(radii):.6f}..{max(radii):.6f})")
print(f"        {len(bubble.clipped_edges)} edges clip against the sphere")
vanished = sum(1 for segs in bubble.clipped_edges.values() if not segs)
print(f"        {vanished} of them vanish entirely (chords between neighbors)")

# everything outside the neighborhood keeps its global position
eff = bubble.effective_positions(positions)
untouched = [v for v in g.nodes if v not in bubble.displaced_positions]
print("global layout preserved:", all((eff[v] == positions[v]).all() for v in untouched))

# jumps morph between view states with one eased parameter
target = sorted(g.adjacency[user])[0]
to_view = apply_condition(g, positions, ViewCondition.BUBBLE, target)
for t in (0.0, 0.25, 0.5, 1.0):
    mid = morph(bubble, to_view, positions, t)
    moved = np.linalg.norm(mid - bubble.effective_positions(positions), axis=1).max()
    print(f"  morph t={t:.2f}: max node displacement {moved:.2f}")

# hop distances color from red (next door) to yellow (farthest)
dist = geodesic_distances(g, user)
far = max(dist.values())
for d in (1, far // 2, far):
    print(f"  {d} hops -> RGB {geodesic_color(d, far)}")
