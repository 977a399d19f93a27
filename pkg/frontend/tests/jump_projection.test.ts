/**
 * Screen-space agreement: after a bubble jump, the positions the renderer
 * would draw equal the server-reported effective positions to within one
 * pixel at the reference camera (the scene's overview pose, 1920x1080).
 */

import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";
import * as THREE from "three";

import { ClientSceneModel } from "../src/model";
import { decodeServerMessage, type ViewState } from "../src/protocol";

const WIDTH = 1920;
const HEIGHT = 1080;

const fixture = JSON.parse(
  readFileSync(new URL("./fixtures/bubble_jump.json", import.meta.url), "utf-8")
) as { target_node: number; messages: object[] };

function referenceCamera(model: ClientSceneModel): THREE.PerspectiveCamera {
  const camera = new THREE.PerspectiveCamera(75, WIDTH / HEIGHT, 0.1, 20000);
  const pose = model.scene!.overview_pose;
  camera.position.set(...pose.position);
  const [w, x, y, z] = pose.orientation;
  camera.quaternion.set(x, y, z, w);
  camera.updateMatrixWorld(true);
  return camera;
}

function toPixels(p: [number, number, number], camera: THREE.Camera): [number, number] {
  const v = new THREE.Vector3(...p).project(camera);
  return [((v.x + 1) / 2) * WIDTH, ((1 - v.y) / 2) * HEIGHT];
}

describe("bubble jump ends pixel-equal to the server state", () => {
  const model = new ClientSceneModel();
  for (const raw of fixture.messages) {
    model.apply(decodeServerMessage(JSON.stringify(raw)));
  }

  it("arrived at the jump target with a bubble view", () => {
    const view = model.view as ViewState;
    expect(view.condition).toBe("bubble");
    expect(view.user_node).toBe(fixture.target_node);
    expect(Object.keys(view.displaced_positions).length).toBeGreaterThan(0);
  });

  it("every rendered node projects within 1 px of the server position", () => {
    const camera = referenceCamera(model);
    const view = model.view as ViewState;
    const base = model.scene!.positions;
    let worst = 0;
    for (let node = 0; node < model.scene!.graph.n; node++) {
      const rendered = model.effectivePosition(node); // what render.ts draws
      const server = view.displaced_positions[String(node)] ?? base[node];
      const [rx, ry] = toPixels(rendered as [number, number, number], camera);
      const [sx, sy] = toPixels(server as [number, number, number], camera);
      worst = Math.max(worst, Math.hypot(rx - sx, ry - sy));
    }
    expect(worst).toBeLessThanOrEqual(1.0);
  });

  it("the final animation frame agrees with the steady state within 1 px", () => {
    const camera = referenceCamera(model);
    const frames = fixture.messages
      .map((m) => decodeServerMessage(JSON.stringify(m)))
      .filter((m) => m.type === "anim.update");
    const last = frames[frames.length - 1].payload as {
      t: number;
      effective_positions: Record<string, [number, number, number]>;
    };
    expect(last.t).toBe(1.0);
    const view = model.view as ViewState;
    for (const [key, framePos] of Object.entries(last.effective_positions)) {
      const steady = view.displaced_positions[key] ?? model.scene!.positions[Number(key)];
      const [fx, fy] = toPixels(framePos, camera);
      const [sx, sy] = toPixels(steady as [number, number, number], camera);
      expect(Math.hypot(fx - sx, fy - sy)).toBeLessThanOrEqual(1.0);
    }
  });
});
