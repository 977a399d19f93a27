"""
Task battery, scoring, and the jump/fly timing model
====================================================

Generates the eight-task sequence on a calibrated scene, scores a few
hand-made responses, then lets the scripted agents race the follow-path
task: jumps take 3 s per hop, flying runs at the calibrated speed.
"""

from egograph import GeneratorParams, ViewCondition, assign_labels, build_scene, generate_ba
from egograph.agents import run_scripted_session
from egograph.tasks import TaskKind, generate_tasks, score_end, score_fcn, score_fip

params = GeneratorParams(n=165, m=2, seed=3)
graph = assign_labels(generate_ba(params), seed=3)
print("laying out the scene (a few seconds)...")
scene = build_scene(graph, params)
print(f"calibrated fly speed: {scene.calibration.max_fly_speed:.2f} units/s")

tasks = generate_tasks(graph, scene.positions, seed=0)
print("task order:", " -> ".join(t.kind.value for t in tasks))
fin = tasks[0]
print(f"FiN: find '{fin.target_label}' among {len(graph.adjacency[fin.hub])} neighbors of node {fin.hub}")

# scoring is plain set / ratio arithmetic
print("FCN truth {2,5}, picked {2,9}:", score_fcn({2, 9}, {2, 5}))
print("END estimate 30 of 40:", score_end(30, 40))
fip = tasks[4]
print("FiP truth path:", fip.truth_path,
      "-> perfect report scores", score_fip(list(fip.truth_path), graph, fip.truth_path))

# the race: perfect jumper vs perfect flyer on the same follow-path task
jumper = run_scripted_session(scene, ViewCondition.BUBBLE, tasks, agent="jumper", questionnaires=False)
flyer = run_scripted_session(scene, ViewCondition.BASELINE, tasks, agent="flyer", questionnaires=False)
t_jump = next(r for r in jumper.results if r.kind == TaskKind.FOP).completion_time
t_fly = next(r for r in flyer.results if r.kind == TaskKind.FOP).completion_time
print(f"FoP by jumping: {t_jump:.1f} s (4 hops x (0.75 s select + 3 s jump))")
print(f"FoP by flying:  {t_fly:.1f} s -> jumping is {t_fly / t_jump:.1f}x faster")

print("every other task, scored for the perfect jumper:")
for r in jumper.results:
    extras = {
        k: round(v, 3)
        for k, v in r.to_dict().items()
        if k not in ("kind", "completion_time", "selected_nodes", "reported_path",
                     "ray_origin", "ray_direction")
        and v is not None
    }
    print(f"  {r.kind.value:5s} {r.completion_time:6.2f} s  {extras}")
