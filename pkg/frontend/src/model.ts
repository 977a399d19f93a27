/**
 * Client-side mirror of the authoritative session.
 *
 * The model stores what the server sent and nothing else: rendering reads
 * server-sent effective positions (steady view state or interpolated
 * animation frames). No layout or ego-view math happens here; between
 * animation frames the model interpolates and never extrapolates past the
 * newest frame.
 */

import type { AnimUpdate, Scene, ServerMessage, Vec3, ViewState } from "./protocol";

interface TimedFrame {
  time: number;
  frame: AnimUpdate;
}

export interface TaskPrompt {
  index: number;
  kind: string;
  instruction: string;
  [key: string]: unknown;
}

export class ClientSceneModel {
  scene: Scene | null = null;
  condition = "baseline";
  studyMode = false;
  view: ViewState | null = null;
  hud: { label: string; degree: number } | null = null;
  prompt: TaskPrompt | null = null;
  lastCompleted: Record<string, unknown> | null = null;
  lastError: string | null = null;
  visited = new Set<number>();
  bookmarks = new Set<number>();
  geodesicOn = false;
  atOverview = true;

  private frames: TimedFrame[] = [];

  apply(msg: ServerMessage): void {
    switch (msg.type) {
      case "scene.init": {
        const payload = msg.payload as { scene: Scene; condition: string; study_mode: boolean };
        this.scene = payload.scene;
        this.condition = payload.condition;
        this.studyMode = payload.study_mode;
        this.frames = [];
        break;
      }
      case "view.state": {
        this.view = msg.payload as ViewState;
        if (this.view.user_node !== null) {
          this.visited.add(this.view.user_node);
          this.atOverview = false;
        }
        // the steady state supersedes any buffered animation
        this.frames = [];
        break;
      }
      case "anim.update": {
        const frame = msg.payload as AnimUpdate;
        this.frames.push({ time: msg.session_seconds, frame });
        if (this.frames.length > 32) {
          this.frames.splice(0, this.frames.length - 32);
        }
        break;
      }
      case "hud.info":
        this.hud = msg.payload as { label: string; degree: number };
        break;
      case "task.prompt":
        this.prompt = msg.payload as TaskPrompt;
        break;
      case "task.complete":
        this.lastCompleted = msg.payload as Record<string, unknown>;
        this.prompt = null;
        break;
      case "error":
        this.lastError = (msg.payload as { message: string }).message;
        break;
    }
  }

  get animating(): boolean {
    const last = this.frames[this.frames.length - 1];
    return last !== undefined && last.frame.t < 1.0;
  }

  /** Effective position of one node at a render time (session seconds). */
  effectivePosition(node: number, renderTime?: number): Vec3 {
    const base = this.scene!.positions[node];
    if (this.frames.length > 0) {
      const [a, b, s] = this.bracket(renderTime);
      const pa = a.frame.effective_positions[String(node)];
      const pb = b.frame.effective_positions[String(node)];
      const from = pa ?? base;
      const to = pb ?? base;
      return [
        from[0] + (to[0] - from[0]) * s,
        from[1] + (to[1] - from[1]) * s,
        from[2] + (to[2] - from[2]) * s,
      ];
    }
    const moved = this.view?.displaced_positions[String(node)];
    return moved ?? base;
  }

  effectivePositions(renderTime?: number): Vec3[] {
    const n = this.scene!.graph.n;
    const out: Vec3[] = new Array(n);
    for (let i = 0; i < n; i++) {
      out[i] = this.effectivePosition(i, renderTime);
    }
    return out;
  }

  /** Interpolated user pose during animations, else the newest known pose. */
  posePosition(renderTime?: number): Vec3 | null {
    if (this.frames.length === 0) {
      return null;
    }
    const [a, b, s] = this.bracket(renderTime);
    const pa = a.frame.pose.position;
    const pb = b.frame.pose.position;
    return [
      pa[0] + (pb[0] - pa[0]) * s,
      pa[1] + (pb[1] - pa[1]) * s,
      pa[2] + (pb[2] - pa[2]) * s,
    ];
  }

  /** Bracketing frames and the interpolation fraction, clamped to the buffer. */
  private bracket(renderTime?: number): [TimedFrame, TimedFrame, number] {
    const frames = this.frames;
    const newest = frames[frames.length - 1];
    if (renderTime === undefined || renderTime >= newest.time || frames.length === 1) {
      return [newest, newest, 0.0]; // hold the newest frame; never extrapolate
    }
    if (renderTime <= frames[0].time) {
      return [frames[0], frames[0], 0.0];
    }
    for (let i = frames.length - 2; i >= 0; i--) {
      if (frames[i].time <= renderTime) {
        const a = frames[i];
        const b = frames[i + 1];
        const span = b.time - a.time;
        return [a, b, span > 0 ? (renderTime - a.time) / span : 0.0];
      }
    }
    return [newest, newest, 0.0];
  }
}
