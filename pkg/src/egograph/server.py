"""Authoritative WebSocket session endpoint.

One client per session: the client sends inputs and intents, the server
owns all state and streams view/animation/task messages back. State
transitions are timestamped deterministically (see session.py); the
broadcast loop only decides how often render frames go out.
"""

from __future__ import annotations

import asyncio
import time
from datetime import datetime, timezone
from pathlib import Path

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .ego import ViewCondition
from .errors import ProtocolError
from .protocol import SceneFile, decode_message, encode_message
from .session import SessionEngine
from .tasks import TaskSet

BROADCAST_HZ = 30.0


def create_app(
    scene: SceneFile,
    condition: ViewCondition,
    tasks: TaskSet | None = None,
    log_dir: str | Path | None = None,
    static_dir: str | Path | None = None,
    broadcast_hz: float = BROADCAST_HZ,
) -> FastAPI:
    app = FastAPI(title="egograph session server")

    @app.get("/healthz")
    async def healthz() -> dict:
        return {"ok": True, "nodes": scene.graph.n, "edges": scene.graph.edge_count}

    @app.websocket("/ws")
    async def ws_session(socket: WebSocket) -> None:
        await socket.accept()
        engine = SessionEngine(scene, condition, tasks)
        wall_offset: float | None = None
        send_lock = asyncio.Lock()

        async def send_all(messages) -> None:
            async with send_lock:
                for msg in messages:
                    await socket.send_text(encode_message(msg))

        async def broadcaster() -> None:
            while True:
                await asyncio.sleep(1.0 / broadcast_hz)
                if wall_offset is None:
                    continue
                now = time.monotonic() - wall_offset
                pending = engine.advance_time(now)
                if engine.anim is not None:
                    pending.append(
                        engine.make_server_message(
                            "anim.update", engine.sample_frame(now), now
                        )
                    )
                if pending:
                    await send_all(pending)

        task = asyncio.create_task(broadcaster())
        try:
            while True:
                text = await socket.receive_text()
                try:
                    msg = decode_message(text, direction="client")
                    if wall_offset is None:
                        wall_offset = time.monotonic() - msg.session_seconds
                    replies = engine.process(msg)
                except ProtocolError as exc:
                    replies = [
                        engine.make_server_message(
                            "error", {"message": str(exc), "ref_seq": 0}, engine.time
                        )
                    ]
                await send_all(replies)
        except WebSocketDisconnect:
            pass
        finally:
            task.cancel()
            if log_dir is not None and engine.log.records:
                stamp = datetime.now(timezone.utc).strftime("%Y%m%dT%H%M%S%f")
                path = Path(log_dir) / f"session-{stamp}.jsonl"
                path.parent.mkdir(parents=True, exist_ok=True)
                engine.log.save(path)

    if static_dir is not None and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="viewer")
    return app


def serve(
    scene: SceneFile,
    condition: ViewCondition,
    tasks: TaskSet | None,
    port: int,
    log_dir: str | Path | None = None,
    static_dir: str | Path | None = None,
) -> None:
    import uvicorn

    app = create_app(scene, condition, tasks, log_dir=log_dir, static_dir=static_dir)
    uvicorn.run(app, host="127.0.0.1", port=port, log_level="warning")
