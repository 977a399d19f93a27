/**
 * Wire contract with the session server.
 *
 * Every message is an envelope {type, seq, session_seconds, payload} with a
 * strictly increasing seq per direction. The zod schemas below mirror the
 * server's validators; the conformance suite checks that everything this
 * client emits parses against them.
 */

import { z } from "zod";

export const vec3 = z.tuple([z.number(), z.number(), z.number()]);
export type Vec3 = z.infer<typeof vec3>;

const axis = z.number().gte(-1).lte(1);
const nodeId = z.number().int().nonnegative();

// ---------------------------------------------------------------- client

export const clientPayloads = {
  hello: z.object({ client: z.string() }),
  "input.fly": z.object({ axis_x: axis, axis_y: axis }),
  "input.pointer": z.object({ origin: vec3, direction: vec3 }),
  "action.select": z.object({ node: nodeId }),
  "action.deselect": z.object({ node: nodeId }),
  "action.jump": z.object({ node: nodeId }),
  "action.bookmark": z.object({ node: nodeId }),
  "action.switch_view": z.object({}),
  "task.submit": z.union([
    z.strictObject({ ready: z.literal(true) }),
    z.strictObject({ estimate: z.number().int().nonnegative() }),
    z.strictObject({ path: z.array(nodeId).nonempty() }),
    z.strictObject({ ray_origin: vec3, ray_direction: vec3 }),
    z.strictObject({}), // FCN: the current selection set is submitted implicitly
  ]),
  "questionnaire.submit": z.object({
    instrument: z.enum(["ssq", "tlx"]),
    items: z.array(z.number()),
  }),
} as const;

export type ClientType = keyof typeof clientPayloads;

// ---------------------------------------------------------------- server

const graphSchema = z.object({
  n: z.number().int().positive(),
  m: z.number().int(),
  seed: z.number().int(),
  labels: z.array(z.string()),
  edges: z.array(z.tuple([nodeId, nodeId])),
});

const poseSchema = z.object({
  position: vec3,
  orientation: z.tuple([z.number(), z.number(), z.number(), z.number()]),
});

export const sceneSchema = z.object({
  graph: graphSchema,
  positions: z.array(vec3),
  layout_params: z.record(z.string(), z.number()),
  calibration: z.object({
    max_fly_speed: z.number().positive(),
    bubble_radius: z.number().positive(),
    node_radius: z.number().positive(),
  }),
  overview_pose: poseSchema,
});

export const viewStateSchema = z.object({
  condition: z.enum(["baseline", "highlight", "bubble"]),
  user_node: nodeId.nullable(),
  highlight_set: z.array(nodeId),
  hidden_edges: z.array(z.tuple([nodeId, nodeId])),
  displaced_positions: z.record(z.string(), vec3),
  clipped_edges: z.array(
    z.object({ edge: z.tuple([nodeId, nodeId]), segments: z.array(z.tuple([vec3, vec3])) })
  ),
  bubble_radius: z.number(),
  geodesic: z
    .object({
      distances: z.array(z.number().int()),
      max_distance: z.number().int().positive(),
      colors: z.array(z.tuple([z.number().int(), z.number().int(), z.number().int()])),
    })
    .optional(),
});

export const animUpdateSchema = z.object({
  t: z.number().gte(0).lte(1),
  pose: poseSchema,
  effective_positions: z.record(z.string(), vec3),
});

export const serverPayloads = {
  "scene.init": z.object({
    scene: sceneSchema,
    condition: z.string(),
    study_mode: z.boolean(),
  }),
  "view.state": viewStateSchema,
  "anim.update": animUpdateSchema,
  "task.prompt": z
    .object({ index: z.number().int(), kind: z.string(), instruction: z.string() })
    .loose(),
  "task.complete": z
    .object({ index: z.number().int(), kind: z.string(), completion_time: z.number() })
    .loose(),
  "hud.info": z.object({ label: z.string(), degree: z.number().int() }),
  error: z.object({ message: z.string(), ref_seq: z.number().int() }),
} as const;

export type ServerType = keyof typeof serverPayloads;

export type SceneInit = z.infer<(typeof serverPayloads)["scene.init"]>;
export type ViewState = z.infer<typeof viewStateSchema>;
export type AnimUpdate = z.infer<typeof animUpdateSchema>;
export type Scene = z.infer<typeof sceneSchema>;

// -------------------------------------------------------------- envelope

export const envelopeSchema = z.object({
  type: z.string(),
  seq: z.number().int().positive(),
  session_seconds: z.number().nonnegative(),
  payload: z.record(z.string(), z.unknown()),
});

export interface ServerMessage {
  type: ServerType;
  seq: number;
  session_seconds: number;
  payload: unknown;
}

export function encodeClientMessage(
  type: ClientType,
  seq: number,
  sessionSeconds: number,
  payload: unknown
): string {
  const checked = clientPayloads[type].parse(payload);
  const envelope = { type, seq, session_seconds: sessionSeconds, payload: checked };
  envelopeSchema.parse(envelope);
  return JSON.stringify(envelope);
}

export function decodeServerMessage(text: string): ServerMessage {
  const envelope = envelopeSchema.parse(JSON.parse(text));
  const schema = serverPayloads[envelope.type as ServerType];
  if (!schema) {
    throw new Error(`unknown server message type '${envelope.type}'`);
  }
  return {
    type: envelope.type as ServerType,
    seq: envelope.seq,
    session_seconds: envelope.session_seconds,
    payload: schema.parse(envelope.payload),
  };
}
