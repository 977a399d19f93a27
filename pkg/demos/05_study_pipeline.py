"""
Study planning, simulated sessions, and analysis
================================================

Counterbalances conditions against graphs with a Graeco-Latin square, runs
one participant's full session with scripted agents, verifies the log
replays to identical results, and aggregates the measures.
"""

import numpy as np

from egograph import GeneratorParams, assign_labels, generate_ba, overview_pose
from egograph.layout import LayoutParams
from egograph.protocol import SceneCalibration, SceneFile
from egograph.study import analyze, build_plan, replay_session, run_session

# the square: every condition and every graph pair once per position
plan = build_plan(participants=25, seed=0)
print("canonical rows (condition, graph-pair):")
for row in {tuple(r) for r in plan.rows}:
    print("  ", [(c.condition.value, c.graph) for c in row])

# quick scenes: random positions stand in for a relaxed layout here, since
# the pipeline itself never looks at layout quality
def quick_scene(n, seed):
    params = GeneratorParams(n=n, m=2, seed=seed)
    g = assign_labels(generate_ba(params), seed=seed)
    positions = np.random.default_rng(seed).normal(scale=80.0, size=(g.n, 3))
    return SceneFile(
        graph=g,
        params=params,
        positions=positions,
        layout_params=LayoutParams(seed=seed),
        calibration=SceneCalibration(max_fly_speed=12.0, bubble_radius=4.0),
        overview=overview_pose(positions),
    )

small, large = quick_scene(165, 3), quick_scene(415, 4)
scenes = {gid: {"small": small, "large": large} for gid in range(3)}

print("running participant 0 (3 conditions x training + measured passes)...")
log = run_session(plan.rows[0], scenes, tasks_seed=1)
completes = log.of_kind("task.complete")
print(f"logged {len(log.records)} events, {len(completes)} task completions")

# the log is the ground truth: replaying its client messages through fresh
# engines reproduces every result exactly
replayed = replay_session(log, scenes)
print("replay identical:", replayed == [r.payload["result"] for r in completes])

report = analyze([log])
print(f"analysis rows (measured passes only): {len(report.rows)}")
for row in report.rows:
    if row.measure == "completion_time":
        print(
            f"  {row.task:5s} {row.condition:9s} n={row.n_kept}/{row.n_samples} "
            f"mean {row.mean:7.2f} s  median {row.median:7.2f} s  [{row.transform}]"
        )
