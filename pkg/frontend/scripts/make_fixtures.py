"""Record a server-side message stream for the headless viewer tests.

Produces tests/fixtures/bubble_jump.json: the scene handshake, a jump
under the bubble condition with intermediate animation frames (as the
serve broadcaster would emit them), and the arrival messages. The viewer
tests replay this stream into the client model and compare projected node
positions against the server-reported state.
"""

import json
from pathlib import Path

from egograph.ego import ViewCondition
from egograph.graphs import GeneratorParams, assign_labels, generate_ba
from egograph.layout import LayoutParams
from egograph.protocol import Message, build_scene
from egograph.session import SessionEngine

OUT = Path(__file__).parent.parent / "tests" / "fixtures" / "bubble_jump.json"


def envelope(msg: Message) -> dict:
    return {
        "type": msg.type,
        "seq": msg.seq,
        "session_seconds": msg.session_seconds,
        "payload": msg.payload,
    }


def main() -> None:
    params = GeneratorParams(n=40, m=2, seed=6)
    g = assign_labels(generate_ba(params), seed=6)
    scene = build_scene(g, params, LayoutParams(seed=6, max_iterations=80))
    engine = SessionEngine(scene, ViewCondition.BUBBLE)

    stream: list[dict] = []
    stream += [
        envelope(m)
        for m in engine.process(
            Message(type="hello", seq=1, session_seconds=0.0, payload={"client": "fixture"})
        )
    ]
    target = 7
    t0 = 1.0
    stream += [
        envelope(m)
        for m in engine.process(
            Message(type="action.jump", seq=2, session_seconds=t0, payload={"node": target})
        )
    ]
    # intermediate render frames, like the serve broadcast loop emits
    for dt in (0.5, 1.0, 1.5, 2.0, 2.5):
        t = t0 + dt
        engine.advance_time(t)
        stream.append(
            envelope(engine.make_server_message("anim.update", engine.sample_frame(t), t))
        )
    stream += [envelope(m) for m in engine.advance_time(t0 + 3.5)]

    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps({"target_node": target, "messages": stream}, indent=1))
    print(f"wrote {OUT} ({len(stream)} messages)")


if __name__ == "__main__":
    main()
