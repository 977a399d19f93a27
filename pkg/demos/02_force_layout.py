"""
3D force-directed layout
========================

Relaxes a small scale-free graph into 3D, reports convergence, and renders
a quick scatter of the result to demo_output/layout.png.
"""

from pathlib import Path

import numpy as np

from egograph import GeneratorParams, LayoutParams, generate_ba, run_layout
from egograph.layout import barnes_hut_repulsion, init_layout, layout_step

g = generate_ba(GeneratorParams(n=165, m=2, seed=0))
params = LayoutParams(seed=0)

positions = run_layout(g, params)
print(f"laid out {g.n} nodes; bounding radius {np.linalg.norm(positions, axis=1).max():.1f} units")
print(f"centroid (should be ~0): {np.abs(positions.mean(axis=0)).max():.2e}")

edge = np.array(g.edges)
lengths = np.linalg.norm(positions[edge[:, 0]] - positions[edge[:, 1]], axis=1)
print(f"edge lengths: median {np.median(lengths):.1f} (rest length {params.link_distance})")

# the cooling schedule freezes the system: one more tick barely moves it
state = init_layout(g, params)
for _ in range(params.max_iterations):
    state = layout_step(state, g, params)
extra = layout_step(state, g, params)
drift = np.linalg.norm(extra.positions - state.positions, axis=1).mean()
print(f"mean drift after one extra tick: {drift:.4f} units")

# octree approximation vs an exact pair sum on a small cloud
cloud = np.random.default_rng(3).uniform(-50, 50, size=(100, 3))
approx = barnes_hut_repulsion(cloud, -30.0)
exact = np.zeros_like(cloud)
for i in range(len(cloud)):
    d = cloud[i] - cloud
    r2 = np.maximum(np.einsum("ij,ij->i", d, d), 1.0)
    r2[i] = np.inf
    exact[i] = (d * (30.0 / r2)[:, None]).sum(axis=0)
rel = np.linalg.norm(approx - exact, axis=1) / np.linalg.norm(exact, axis=1)
print(f"octree force error vs exact: max {rel.max() * 100:.2f}%")

out = Path("demo_output")
out.mkdir(exist_ok=True)
try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig = plt.figure(figsize=(7, 7))
    ax = fig.add_subplot(projection="3d")
    for u, v in g.edges:
        ax.plot(*positions[[u, v]].T, color="0.8", linewidth=0.5)
    ax.scatter(*positions.T, s=12, c="tab:red", depthshade=True)
    ax.set_axis_off()
    fig.savefig(out / "layout.png", dpi=120, bbox_inches="tight")
    print(f"wrote {out / 'layout.png'}")
except ImportError:
    print("matplotlib not available; skipped the render")
