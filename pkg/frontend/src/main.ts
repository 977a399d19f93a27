/**
 * Viewer bootstrap: connect, mirror server state, render, map input.
 *
 * URL parameters: ?host=127.0.0.1&port=8765 (defaults match `egograph
 * serve`). The client never simulates: every state change round-trips
 * through the session server.
 */

import { ClientSceneModel } from "./model";
import { connect } from "./net";
import { FirstPersonControls } from "./controls";
import { Hud } from "./hud";
import { SceneRenderer } from "./render";
import type { ServerMessage } from "./protocol";

async function boot(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const host = params.get("host") ?? (window.location.hostname || "127.0.0.1");
  const port = params.get("port") ?? "8765";
  const url = `ws://${host}:${port}/ws`;

  const canvas = document.getElementById("scene") as HTMLCanvasElement;
  const overlay = document.getElementById("overlay") as HTMLElement;
  const model = new ClientSceneModel();
  const renderer = new SceneRenderer(model, canvas);

  let initialized = false;
  const pending: ServerMessage[] = [];
  const client = await connect(url, (msg) => {
    model.apply(msg);
    pending.push(msg);
  });

  const { TaskPanel } = await import("./taskpanel");
  const panel = new TaskPanel(overlay, model, client);
  const hud = new Hud(overlay, model, client);
  const controls = new FirstPersonControls(canvas, renderer, client);
  panel.getRay = () => controls.cameraRay();
  hud.onBookmark = () => {
    const node = renderer.pick(0, 0);
    if (node !== null) {
      model.bookmarks.has(node) ? model.bookmarks.delete(node) : model.bookmarks.add(node);
      client.bookmark(node);
    }
  };
  controls.onHover = (node) => renderer.setHover(node);
  controls.onNodeClick = (node, shift) => {
    // shift-click jumps (ego conditions); plain click selects
    if (shift && model.condition !== "baseline") {
      client.jump(node);
    } else {
      client.select(node);
      panel.addPathNode(node);
    }
  };

  client.hello();

  const resize = () => renderer.resize(window.innerWidth, window.innerHeight);
  window.addEventListener("resize", resize);

  const loop = (nowMs: number) => {
    for (const msg of pending.splice(0)) {
      if (msg.type === "scene.init" && !initialized) {
        initialized = true;
        renderer.init();
        resize();
      }
      if (msg.type === "task.prompt" || msg.type === "task.complete") {
        panel.render();
      }
    }
    if (initialized) {
      controls.tick(nowMs);
      renderer.update(client.sessionSeconds());
      hud.update(model);
      renderer.draw();
    }
    requestAnimationFrame(loop);
  };
  requestAnimationFrame(loop);
}

boot().catch((err) => {
  const overlay = document.getElementById("overlay");
  if (overlay) {
    overlay.textContent = `connection failed: ${err}`;
  }
});
