/**
 * Desktop stand-in for the HMD and controller: pointer-lock mouse look,
 * WASD/arrow keys as the trackpad axes, and the camera ray as the laser
 * pointer. The camera only *renders* the pose; the authoritative position
 * comes back from the server, so flying feels server-driven by design.
 */

import * as THREE from "three";

import type { SessionClient } from "./net";
import type { SceneRenderer } from "./render";

const POINTER_SEND_HZ = 12;

export class FirstPersonControls {
  private yaw = 0;
  private pitch = 0;
  private keys = new Set<string>();
  private lastAxes: [number, number] = [0, 0];
  private lastPointerSent = 0;
  onNodeClick: ((node: number, shift: boolean) => void) | null = null;
  onHover: ((node: number | null) => void) | null = null;

  constructor(
    private readonly canvas: HTMLCanvasElement,
    private readonly renderer: SceneRenderer,
    private readonly client: SessionClient
  ) {
    canvas.addEventListener("click", (event) => {
      if (document.pointerLockElement !== canvas) {
        canvas.requestPointerLock();
        return;
      }
      const node = renderer.pick(0, 0); // locked pointer aims screen center
      if (node !== null && this.onNodeClick) {
        this.onNodeClick(node, event.shiftKey);
      }
    });
    document.addEventListener("mousemove", (event) => {
      if (document.pointerLockElement !== canvas) {
        return;
      }
      this.yaw -= event.movementX * 0.0022;
      this.pitch -= event.movementY * 0.0022;
      this.pitch = Math.max(-1.55, Math.min(1.55, this.pitch));
    });
    document.addEventListener("keydown", (event) => this.keys.add(event.code));
    document.addEventListener("keyup", (event) => this.keys.delete(event.code));
  }

  private axes(): [number, number] {
    let x = 0;
    let y = 0;
    if (this.keys.has("KeyW") || this.keys.has("ArrowUp")) y += 1;
    if (this.keys.has("KeyS") || this.keys.has("ArrowDown")) y -= 1;
    if (this.keys.has("KeyD") || this.keys.has("ArrowRight")) x += 1;
    if (this.keys.has("KeyA") || this.keys.has("ArrowLeft")) x -= 1;
    return [x, y];
  }

  /** Per-frame: orient the camera, stream axis changes and the pointer ray. */
  tick(nowMs: number): void {
    const camera = this.renderer.camera;
    camera.quaternion.setFromEuler(new THREE.Euler(this.pitch, this.yaw, 0, "YXZ"));

    const axes = this.axes();
    if (axes[0] !== this.lastAxes[0] || axes[1] !== this.lastAxes[1]) {
      this.client.fly(axes[0], axes[1]);
      this.lastAxes = axes;
    }

    if (nowMs - this.lastPointerSent > 1000 / POINTER_SEND_HZ) {
      this.lastPointerSent = nowMs;
      const direction = new THREE.Vector3();
      camera.getWorldDirection(direction);
      this.client.pointer(
        [camera.position.x, camera.position.y, camera.position.z],
        [direction.x, direction.y, direction.z]
      );
      if (this.onHover) {
        this.onHover(this.renderer.pick(0, 0));
      }
    }
  }

  /** Current camera ray, submitted verbatim for the pointing tasks. */
  cameraRay(): { origin: [number, number, number]; direction: [number, number, number] } {
    const camera = this.renderer.camera;
    const direction = new THREE.Vector3();
    camera.getWorldDirection(direction).normalize();
    return {
      origin: [camera.position.x, camera.position.y, camera.position.z],
      direction: [direction.x, direction.y, direction.z],
    };
  }
}
