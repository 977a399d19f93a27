"""Command-line entry points.

Every subcommand is deterministic given its seed flags and exits nonzero
with a diagnostic on any error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .ego import ViewCondition
from .errors import EgographError
from .events import EventLog
from .graphs import GeneratorParams, assign_labels, generate_ba, graph_from_dict, graph_to_dict
from .layout import LayoutParams
from .protocol import build_scene, load_scene, save_scene
from .study import analyze, build_plan, run_session
from .tasks import generate_tasks, task_set_from_dict, task_set_to_dict

DEFAULT_PORT = int(os.environ.get("EGOGRAPH_PORT", "8765"))

_CONDITIONS = {
    "baseline": ViewCondition.BASELINE,
    "highlight": ViewCondition.HIGHLIGHT,
    "bubble": ViewCondition.BUBBLE,
}


def _cmd_generate(args) -> int:
    params = GeneratorParams(n=args.nodes, m=args.edges_per_node, seed=args.seed)
    g = assign_labels(generate_ba(params), seed=args.seed)
    Path(args.out).write_text(json.dumps(graph_to_dict(g, params)), encoding="utf-8")
    print(f"wrote {args.out}: {g.n} nodes, {g.edge_count} edges")
    return 0


def _cmd_layout(args) -> int:
    g, params = graph_from_dict(json.loads(Path(args.graph_in).read_text(encoding="utf-8")))
    scene = build_scene(g, params, LayoutParams(seed=args.seed))
    save_scene(args.out, scene)
    print(
        f"wrote {args.out}: {g.n} nodes laid out, "
        f"max_fly_speed {scene.calibration.max_fly_speed:.3f} units/s"
    )
    return 0


def _cmd_tasks(args) -> int:
    scene = load_scene(args.scene)
    tasks = generate_tasks(scene.graph, scene.positions, seed=args.seed)
    Path(args.out).write_text(
        json.dumps(task_set_to_dict(tasks, seed=args.seed)), encoding="utf-8"
    )
    print(f"wrote {args.out}: {len(tasks)} tasks ({', '.join(t.kind.value for t in tasks)})")
    return 0


def _cmd_plan(args) -> int:
    plan = build_plan(args.participants, seed=args.seed)
    Path(args.out).write_text(json.dumps(plan.to_dict()), encoding="utf-8")
    print(f"wrote {args.out}: {plan.participants} participants, 3 cells each")
    return 0


def _cmd_simulate(args) -> int:
    scene = load_scene(args.scene)
    tasks, tasks_seed = task_set_from_dict(
        json.loads(Path(args.tasks).read_text(encoding="utf-8"))
    )
    condition = _CONDITIONS[args.condition]
    from .agents import run_scripted_session

    log = EventLog()
    log.append(
        0.0,
        "pass.start",
        {
            "condition": condition.value,
            "graph": scene.params.seed,
            "phase": "measured",
            "tasks_seed": tasks_seed,
        },
    )
    engine = run_scripted_session(
        scene, condition, tasks, agent=args.agent, start_time=1.0, log=log
    )
    log.append(log.end_seconds, "pass.end", {"phase": "measured"})
    log.save(args.out)
    times = {r.kind.value: round(r.completion_time, 3) for r in engine.results}
    print(f"wrote {args.out}: {len(engine.results)} task results, times {times}")
    return 0


def _cmd_serve(args) -> int:
    scene = load_scene(args.scene)
    tasks = None
    if args.tasks is not None:
        tasks, _ = task_set_from_dict(json.loads(Path(args.tasks).read_text(encoding="utf-8")))
    from .server import serve

    print(f"serving on ws://127.0.0.1:{args.port}/ws (ctrl-c to stop)")
    serve(
        scene,
        _CONDITIONS[args.condition],
        tasks,
        port=args.port,
        log_dir=args.log,
        static_dir=args.static,
    )
    return 0


def _cmd_analyze(args) -> int:
    paths = sorted(Path(args.logs).glob("*.jsonl"))
    if not paths:
        print("no logs found", file=sys.stderr)
        return 1
    logs = [EventLog.load(p) for p in paths]
    report = analyze(logs)
    Path(args.out_csv).write_text(report.to_csv(), encoding="utf-8")
    json_path = Path(args.out_csv).with_suffix(".json")
    json_path.write_text(report.to_json(), encoding="utf-8")
    for warning in report.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    print(f"wrote {args.out_csv} and {json_path}: {len(report.rows)} measure rows")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="egograph",
        description="Deterministic engine for egocentric 3D network exploration studies.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a labeled scale-free graph")
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--edges-per-node", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("layout", help="lay a graph out into a calibrated scene")
    p.add_argument("--in", dest="graph_in", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_layout)

    p = sub.add_parser("tasks", help="generate the eight-task battery for a scene")
    p.add_argument("--scene", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_tasks)

    p = sub.add_parser("plan", help="build a Graeco-Latin study plan")
    p.add_argument("--participants", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_plan)

    p = sub.add_parser("simulate", help="run a scripted agent through a task battery")
    p.add_argument("--scene", required=True)
    p.add_argument("--tasks", required=True)
    p.add_argument("--condition", choices=sorted(_CONDITIONS), required=True)
    p.add_argument("--agent", choices=["jumper", "flyer"], required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("serve", help="serve an interactive session endpoint")
    p.add_argument("--scene", required=True)
    p.add_argument("--tasks", default=None)
    p.add_argument("--condition", choices=sorted(_CONDITIONS), required=True)
    p.add_argument("--port", type=int, default=DEFAULT_PORT)
    p.add_argument("--log", default=None)
    p.add_argument("--static", default=None, help="directory with the built viewer")
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("analyze", help="aggregate logs into the measure report")
    p.add_argument("--logs", required=True)
    p.add_argument("--out-csv", required=True)
    p.set_defaults(func=_cmd_analyze)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except EgographError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
