import json

import numpy as np
import pytest
from starlette.testclient import TestClient

from egograph.cli import main
from egograph.ego import ViewCondition
from egograph.errors import ParameterError, ProtocolError
from egograph.events import EventLog
from egograph.graphs import GeneratorParams, assign_labels, generate_ba
from egograph.layout import LayoutParams
from egograph.protocol import (
    Message,
    SequenceChecker,
    build_scene,
    decode_message,
    encode_message,
    load_scene,
    save_scene,
    scene_from_dict,
    scene_to_dict,
)
from egograph.server import create_app
from egograph.session import SessionEngine
from egograph.tasks import generate_tasks


def sample_payload(rng, mtype: str) -> dict:
    vec = lambda: [float(v) for v in rng.normal(size=3)]
    table = {
        "hello": {"client": "viewer-0.1"},
        "input.fly": {"axis_x": float(rng.uniform(-1, 1)), "axis_y": float(rng.uniform(-1, 1))},
        "input.pointer": {"origin": vec(), "direction": vec()},
        "action.select": {"node": int(rng.integers(100))},
        "action.deselect": {"node": int(rng.integers(100))},
        "action.jump": {"node": int(rng.integers(100))},
        "action.bookmark": {"node": int(rng.integers(100))},
        "action.switch_view": {},
        "task.submit": {"estimate": int(rng.integers(50))},
        "questionnaire.submit": {"instrument": "ssq", "items": [1] * 16},
    }
    return table[mtype]


class TestEnvelope:
    def test_roundtrip_all_client_types(self):
        rng = np.random.default_rng(0)
        for trial in range(200):
            from egograph.protocol import CLIENT_PAYLOADS

            mtype = list(CLIENT_PAYLOADS)[trial % len(CLIENT_PAYLOADS)]
            msg = Message(
                type=mtype,
                seq=trial + 1,
                session_seconds=float(rng.uniform(0, 1e4)),
                payload=sample_payload(rng, mtype),
            )
            back = decode_message(encode_message(msg), direction="client")
            assert back == msg

    def test_unknown_type_rejected_loudly(self):
        text = json.dumps(
            {"type": "mystery.op", "seq": 1, "session_seconds": 0.0, "payload": {}}
        )
        with pytest.raises(ProtocolError, match="mystery.op"):
            decode_message(text, direction="client")

    def test_missing_envelope_field(self):
        with pytest.raises(ProtocolError, match="seq"):
            decode_message(
                json.dumps({"type": "hello", "session_seconds": 0.0, "payload": {}})
            )

    def test_payload_field_validation(self):
        bad = json.dumps(
            {
                "type": "input.fly",
                "seq": 1,
                "session_seconds": 0.0,
                "payload": {"axis_x": 2.0, "axis_y": 0.0},
            }
        )
        with pytest.raises(ProtocolError, match="axis_x"):
            decode_message(bad)

    def test_not_json(self):
        with pytest.raises(ProtocolError):
            decode_message("definitely not json {")

    def test_sequence_checker(self):
        checker = SequenceChecker()
        checker.check(1)
        checker.check(5)
        with pytest.raises(ProtocolError):
            checker.check(5)
        with pytest.raises(ProtocolError):
            checker.check(2)


@pytest.fixture(scope="module")
def tiny_scene():
    params = GeneratorParams(n=40, m=2, seed=6)
    g = assign_labels(generate_ba(params), seed=6)
    return build_scene(g, params, LayoutParams(seed=6, max_iterations=80))


class TestSceneFile:
    def test_roundtrip_exact(self, tiny_scene, tmp_path):
        path = tmp_path / "scene.json"
        save_scene(path, tiny_scene)
        loaded = load_scene(path)
        assert loaded.graph == tiny_scene.graph
        assert loaded.params == tiny_scene.params
        np.testing.assert_array_equal(loaded.positions, tiny_scene.positions)
        assert loaded.layout_params == tiny_scene.layout_params
        assert loaded.calibration == tiny_scene.calibration
        np.testing.assert_array_equal(loaded.overview.position, tiny_scene.overview.position)

    def test_position_count_validated(self, tiny_scene):
        obj = scene_to_dict(tiny_scene)
        obj["positions"] = obj["positions"][:-1]
        with pytest.raises(ParameterError):
            scene_from_dict(obj)

    def test_calibration_required(self, tiny_scene):
        obj = scene_to_dict(tiny_scene)
        del obj["calibration"]["max_fly_speed"]
        with pytest.raises(ParameterError):
            scene_from_dict(obj)


def ws_exchange(app, outgoing: list[dict], expected: int) -> list[Message]:
    """Send envelopes over the websocket, receive `expected` replies."""
    received: list[Message] = []
    with TestClient(app) as tc:
        with tc.websocket_connect("/ws") as ws:
            for obj in outgoing:
                ws.send_text(json.dumps(obj))
            while len(received) < expected:
                received.append(decode_message(ws.receive_text(), direction="server"))
    return received


class TestServer:
    def test_hello_scene_init_matches(self, quick_scene):
        app = create_app(quick_scene, ViewCondition.BASELINE)
        with TestClient(app) as tc:
            with tc.websocket_connect("/ws") as ws:
                ws.send_text(
                    json.dumps(
                        {"type": "hello", "seq": 1, "session_seconds": 0.0, "payload": {"client": "t"}}
                    )
                )
                init = decode_message(ws.receive_text(), direction="server")
                assert init.type == "scene.init"
                assert init.payload["scene"]["graph"]["n"] == quick_scene.graph.n
                view = decode_message(ws.receive_text(), direction="server")
                assert view.type == "view.state"

    def test_malformed_message_gets_error_reply(self, quick_scene):
        app = create_app(quick_scene, ViewCondition.BASELINE)
        with TestClient(app) as tc:
            with tc.websocket_connect("/ws") as ws:
                ws.send_text(json.dumps({"type": "nonsense", "seq": 1, "session_seconds": 0, "payload": {}}))
                reply = decode_message(ws.receive_text(), direction="server")
                assert reply.type == "error"
                assert "nonsense" in reply.payload["message"]

    def test_server_equals_direct_engine(self, quick_scene):
        tasks = generate_tasks(quick_scene.graph, quick_scene.positions, seed=2)
        sequence = [
            {"type": "hello", "seq": 1, "session_seconds": 0.0, "payload": {"client": "t"}},
            {
                "type": "action.select",
                "seq": 2,
                "session_seconds": 1.25,
                "payload": {"node": tasks[0].target_node},
            },
            {
                "type": "action.select",
                "seq": 3,
                "session_seconds": 2.5,
                "payload": {"node": sorted(quick_scene.graph.adjacency[tasks[1].pair[0]])[0]},
            },
            {"type": "task.submit", "seq": 4, "session_seconds": 3.75, "payload": {}},
        ]
        engine = SessionEngine(quick_scene, ViewCondition.HIGHLIGHT, tasks)
        direct: list[Message] = []
        for obj in sequence:
            direct.extend(engine.process(decode_message(json.dumps(obj))))

        # near-zero broadcast rate keeps the render stream out of the capture
        app = create_app(quick_scene, ViewCondition.HIGHLIGHT, tasks, broadcast_hz=0.001)
        over_ws = ws_exchange(app, sequence, expected=len(direct))

        assert [m.type for m in over_ws] == [m.type for m in direct]
        for a, b in zip(over_ws, direct):
            assert a.payload == b.payload
            assert a.session_seconds == b.session_seconds
            assert a.seq == b.seq

    def test_session_log_written_on_disconnect(self, quick_scene, tmp_path):
        app = create_app(quick_scene, ViewCondition.BASELINE, log_dir=tmp_path)
        with TestClient(app) as tc:
            with tc.websocket_connect("/ws") as ws:
                ws.send_text(
                    json.dumps({"type": "hello", "seq": 1, "session_seconds": 0.0, "payload": {"client": "t"}})
                )
                ws.receive_text()
        logs = list(tmp_path.glob("session-*.jsonl"))
        assert len(logs) == 1
        assert EventLog.load(logs[0]).of_kind("session.header")


class TestCli:
    def test_generate_paper_sizes(self, tmp_path, capsys):
        out = tmp_path / "g.json"
        assert main(["generate", "--nodes", "165", "--edges-per-node", "2", "--seed", "1", "--out", str(out)]) == 0
        assert "326 edges" in capsys.readouterr().out
        obj = json.loads(out.read_text())
        assert obj["n"] == 165 and len(obj["edges"]) == 326

    def test_invalid_generate_params_fail(self, tmp_path, capsys):
        out = tmp_path / "g.json"
        rc = main(["generate", "--nodes", "2", "--edges-per-node", "2", "--out", str(out)])
        assert rc == 1
        assert "error" in capsys.readouterr().err

    def test_full_chain_deterministic(self, tmp_path, capsys):
        graph = tmp_path / "graph.json"
        scene = tmp_path / "scene.json"
        tasks = tmp_path / "tasks.json"
        plan = tmp_path / "plan.json"
        logs = tmp_path / "logs"
        logs.mkdir()
        assert main(["generate", "--nodes", "165", "--edges-per-node", "2", "--seed", "3", "--out", str(graph)]) == 0
        assert main(["layout", "--in", str(graph), "--seed", "3", "--out", str(scene)]) == 0
        assert main(["tasks", "--scene", str(scene), "--seed", "3", "--out", str(tasks)]) == 0
        assert main(["plan", "--participants", "25", "--seed", "3", "--out", str(plan)]) == 0
        assert (
            main(
                [
                    "simulate",
                    "--scene",
                    str(scene),
                    "--tasks",
                    str(tasks),
                    "--condition",
                    "bubble",
                    "--agent",
                    "jumper",
                    "--out",
                    str(logs / "run1.jsonl"),
                ]
            )
            == 0
        )
        csv_out = tmp_path / "report.csv"
        assert main(["analyze", "--logs", str(logs), "--out-csv", str(csv_out)]) == 0
        assert csv_out.exists() and csv_out.with_suffix(".json").exists()
        header, *rows = csv_out.read_text().strip().splitlines()
        assert header.startswith("task,condition,measure")
        assert any(row.startswith("FoP,bubble,completion_time") for row in rows)
        # determinism: regenerating the graph yields identical bytes
        graph2 = tmp_path / "graph2.json"
        main(["generate", "--nodes", "165", "--edges-per-node", "2", "--seed", "3", "--out", str(graph2)])
        assert graph.read_text() == graph2.read_text()

    def test_analyze_empty_dir_nonzero(self, tmp_path, capsys):
        empty = tmp_path / "none"
        empty.mkdir()
        rc = main(["analyze", "--logs", str(empty), "--out-csv", str(tmp_path / "r.csv")])
        assert rc != 0
        assert "no logs found" in capsys.readouterr().err

    def test_flyer_baseline_simulate(self, tmp_path):
        graph = tmp_path / "graph.json"
        scene = tmp_path / "scene.json"
        tasks = tmp_path / "tasks.json"
        main(["generate", "--nodes", "165", "--edges-per-node", "2", "--seed", "5", "--out", str(graph)])
        main(["layout", "--in", str(graph), "--seed", "5", "--out", str(scene)])
        main(["tasks", "--scene", str(scene), "--seed", "5", "--out", str(tasks)])
        rc = main(
            [
                "simulate",
                "--scene",
                str(scene),
                "--tasks",
                str(tasks),
                "--condition",
                "baseline",
                "--agent",
                "flyer",
                "--out",
                str(tmp_path / "fly.jsonl"),
            ]
        )
        assert rc == 0
        # mismatched pairing is a diagnosed failure, not a crash
        rc = main(
            [
                "simulate",
                "--scene",
                str(scene),
                "--tasks",
                str(tasks),
                "--condition",
                "baseline",
                "--agent",
                "jumper",
                "--out",
                str(tmp_path / "bad.jsonl"),
            ]
        )
        assert rc == 1
