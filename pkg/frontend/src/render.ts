/**
 * three.js presentation of the mirrored session state.
 *
 * Nodes are instanced spheres, edges are cylinders ("tubes"), labels are
 * billboarded canvas sprites, neighbor halos are additive glow sprites.
 * Positions always come from the model's server-sent effective positions;
 * this module owns only appearance.
 */

import * as THREE from "three";

import type { ClientSceneModel } from "./model";
import type { Vec3 } from "./protocol";

const NODE_COLOR = new THREE.Color(0xc8443c);
const EDGE_COLOR = new THREE.Color(0x9aa3ad);
const HALO_COLOR = 0xffd500;
const VISITED_COLOR = new THREE.Color(0x3c78c8);
const DIM_FACTOR = 0.18;
const SKY_COLOR = 0x10131c;
const GROUND_COLOR = 0x1c2430;

function haloTexture(): THREE.Texture {
  const size = 128;
  const canvas = document.createElement("canvas");
  canvas.width = canvas.height = size;
  const ctx = canvas.getContext("2d")!;
  const grad = ctx.createRadialGradient(size / 2, size / 2, size * 0.18, size / 2, size / 2, size / 2);
  grad.addColorStop(0, "rgba(255, 213, 0, 0.95)");
  grad.addColorStop(0.55, "rgba(255, 213, 0, 0.35)");
  grad.addColorStop(1, "rgba(255, 213, 0, 0)");
  ctx.fillStyle = grad;
  ctx.fillRect(0, 0, size, size);
  return new THREE.CanvasTexture(canvas);
}

function labelTexture(text: string): THREE.Texture {
  const canvas = document.createElement("canvas");
  canvas.width = 128;
  canvas.height = 48;
  const ctx = canvas.getContext("2d")!;
  ctx.font = "bold 30px system-ui, sans-serif";
  ctx.textAlign = "center";
  ctx.textBaseline = "middle";
  ctx.fillStyle = "rgba(255,255,255,0.92)";
  ctx.fillText(text, 64, 26);
  return new THREE.CanvasTexture(canvas);
}

export class SceneRenderer {
  readonly scene = new THREE.Scene();
  readonly camera: THREE.PerspectiveCamera;
  private renderer: THREE.WebGLRenderer | null = null;

  private nodes!: THREE.InstancedMesh;
  private labels: THREE.Sprite[] = [];
  private halos: THREE.Sprite[] = [];
  private edgeGroup = new THREE.Group();
  private clipGroup = new THREE.Group();
  private edgeMeshes: THREE.Mesh[] = [];
  private edgeMaterial = new THREE.MeshLambertMaterial({ color: EDGE_COLOR });
  private edgeDimMaterial = new THREE.MeshLambertMaterial({
    color: EDGE_COLOR.clone().multiplyScalar(DIM_FACTOR),
    transparent: true,
    opacity: 0.35,
  });
  private unitCylinder = new THREE.CylinderGeometry(0.35, 0.35, 1.0, 6, 1, true);
  private hovered: number | null = null;
  private nodeRadius = 2.0;

  constructor(private readonly model: ClientSceneModel, canvas?: HTMLCanvasElement) {
    this.camera = new THREE.PerspectiveCamera(75, 16 / 9, 0.1, 20000);
    if (canvas) {
      this.renderer = new THREE.WebGLRenderer({ canvas, antialias: true });
      this.renderer.setPixelRatio(window.devicePixelRatio);
    }
    this.scene.background = new THREE.Color(SKY_COLOR);
    this.scene.add(new THREE.HemisphereLight(0xeeeeff, 0x445566, 1.1));
    const sun = new THREE.DirectionalLight(0xffffff, 0.7);
    sun.position.set(1, 2, 1.5);
    this.scene.add(sun);
    this.scene.add(this.edgeGroup);
    this.scene.add(this.clipGroup);
  }

  /** Build all per-node and per-edge objects once the scene file arrives. */
  init(): void {
    const scene = this.model.scene!;
    const n = scene.graph.n;
    this.nodeRadius = scene.calibration.node_radius;

    this.nodes = new THREE.InstancedMesh(
      new THREE.SphereGeometry(this.nodeRadius, 18, 14),
      new THREE.MeshLambertMaterial({ color: 0xffffff }),
      n
    );
    for (let i = 0; i < n; i++) {
      this.nodes.setColorAt(i, NODE_COLOR);
    }
    this.scene.add(this.nodes);

    const halo = haloTexture();
    for (let i = 0; i < n; i++) {
      const label = new THREE.Sprite(
        new THREE.SpriteMaterial({ map: labelTexture(scene.graph.labels[i]), depthTest: false })
      );
      label.scale.set(9, 3.4, 1); // sprites always face the camera
      this.labels.push(label);
      this.scene.add(label);

      const glow = new THREE.Sprite(
        new THREE.SpriteMaterial({
          map: halo,
          color: HALO_COLOR,
          blending: THREE.AdditiveBlending,
          depthWrite: false,
        })
      );
      glow.scale.setScalar(this.nodeRadius * 6);
      glow.visible = false;
      this.halos.push(glow);
      this.scene.add(glow);
    }

    for (const [u, v] of scene.graph.edges) {
      const mesh = new THREE.Mesh(this.unitCylinder, this.edgeMaterial);
      mesh.userData = { u, v };
      this.edgeMeshes.push(mesh);
      this.edgeGroup.add(mesh);
    }

    // skybox stand-in: sky backdrop plus a ground plane as a static landmark
    const radius = scene.positions.reduce(
      (best, p) => Math.max(best, Math.hypot(p[0], p[1], p[2])),
      10
    );
    const ground = new THREE.Mesh(
      new THREE.CircleGeometry(radius * 6, 48),
      new THREE.MeshLambertMaterial({ color: GROUND_COLOR, side: THREE.DoubleSide })
    );
    ground.rotation.x = -Math.PI / 2;
    ground.position.y = -radius * 1.8;
    this.scene.add(ground);
    const grid = new THREE.GridHelper(radius * 6, 40, 0x33404f, 0x222c38);
    grid.position.y = -radius * 1.8 + 0.1;
    this.scene.add(grid);

    const overview = scene.overview_pose;
    this.camera.position.set(...overview.position);
    const [w, x, y, z] = overview.orientation;
    this.camera.quaternion.set(x, y, z, w);
  }

  /** Hover lowlighting: keep the hovered node's neighborhood, dim the rest. */
  setHover(node: number | null): void {
    this.hovered = node;
  }

  private placeEdge(mesh: THREE.Mesh, a: Vec3, b: Vec3): void {
    const ax = a[0], ay = a[1], az = a[2];
    const dx = b[0] - ax, dy = b[1] - ay, dz = b[2] - az;
    const length = Math.hypot(dx, dy, dz);
    mesh.visible = length > 1e-9;
    if (!mesh.visible) {
      return;
    }
    mesh.position.set(ax + dx / 2, ay + dy / 2, az + dz / 2);
    mesh.scale.set(1, length, 1);
    mesh.quaternion.setFromUnitVectors(
      new THREE.Vector3(0, 1, 0),
      new THREE.Vector3(dx / length, dy / length, dz / length)
    );
  }

  /** Per-frame sync of every position-dependent object. */
  update(renderTime?: number): void {
    const model = this.model;
    if (!model.scene) {
      return;
    }
    const view = model.view;
    const positions = model.effectivePositions(renderTime);
    const n = positions.length;

    const neighborKeep = new Set<number>();
    if (this.hovered !== null) {
      neighborKeep.add(this.hovered);
      for (const [u, v] of model.scene.graph.edges) {
        if (u === this.hovered) neighborKeep.add(v);
        if (v === this.hovered) neighborKeep.add(u);
      }
    }

    const matrix = new THREE.Matrix4();
    const highlight = new Set(view?.highlight_set ?? []);
    const geodesic = model.geodesicOn ? view?.geodesic : undefined;
    const color = new THREE.Color();
    for (let i = 0; i < n; i++) {
      const p = positions[i];
      matrix.setPosition(p[0], p[1], p[2]);
      this.nodes.setMatrixAt(i, matrix);

      if (geodesic) {
        const [r, g, b] = geodesic.colors[i];
        color.setRGB(r / 255, g / 255, b / 255);
      } else if (model.atOverview && model.visited.has(i)) {
        color.copy(VISITED_COLOR);
      } else {
        color.copy(NODE_COLOR);
      }
      if (this.hovered !== null && !neighborKeep.has(i)) {
        color.multiplyScalar(DIM_FACTOR);
      }
      this.nodes.setColorAt(i, color);

      this.labels[i].position.set(p[0], p[1] + this.nodeRadius * 2.2, p[2]);
      this.halos[i].visible = highlight.has(i);
      this.halos[i].position.set(p[0], p[1], p[2]);
    }
    this.nodes.instanceMatrix.needsUpdate = true;
    if (this.nodes.instanceColor) {
      this.nodes.instanceColor.needsUpdate = true;
    }

    const hidden = new Set((view?.hidden_edges ?? []).map(([u, v]) => `${u}-${v}`));
    const clipped = new Map(
      (view?.clipped_edges ?? []).map((c) => [`${c.edge[0]}-${c.edge[1]}`, c.segments])
    );
    this.clipGroup.clear();
    for (const mesh of this.edgeMeshes) {
      const { u, v } = mesh.userData as { u: number; v: number };
      const key = `${u}-${v}`;
      const dim =
        this.hovered !== null && u !== this.hovered && v !== this.hovered;
      mesh.material = dim ? this.edgeDimMaterial : this.edgeMaterial;
      if (hidden.has(key)) {
        mesh.visible = false;
        continue;
      }
      const segments = clipped.get(key);
      if (segments !== undefined && !model.animating) {
        mesh.visible = false; // replaced by its outside-the-bubble pieces
        for (const [a, b] of segments) {
          const piece = new THREE.Mesh(this.unitCylinder, mesh.material);
          this.placeEdge(piece, a, b);
          this.clipGroup.add(piece);
        }
        continue;
      }
      this.placeEdge(mesh, positions[u], positions[v]);
    }
  }

  /** Ray pick against current node spheres; returns the nearest node id. */
  pick(ndcX: number, ndcY: number): number | null {
    const caster = new THREE.Raycaster();
    caster.setFromCamera(new THREE.Vector2(ndcX, ndcY), this.camera);
    const hits = caster.intersectObject(this.nodes);
    return hits.length > 0 && hits[0].instanceId !== undefined ? hits[0].instanceId : null;
  }

  resize(width: number, height: number): void {
    this.camera.aspect = width / height;
    this.camera.updateProjectionMatrix();
    this.renderer?.setSize(width, height, false);
  }

  draw(): void {
    this.renderer?.render(this.scene, this.camera);
  }
}
