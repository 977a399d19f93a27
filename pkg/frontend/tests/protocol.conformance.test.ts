/**
 * Conformance: every message this client can emit validates against the
 * wire schemas, and a recorded server stream decodes cleanly.
 */

import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { SessionClient } from "../src/net";
import {
  clientPayloads,
  decodeServerMessage,
  envelopeSchema,
  type ClientType,
} from "../src/protocol";

const fixture = JSON.parse(
  readFileSync(new URL("./fixtures/bubble_jump.json", import.meta.url), "utf-8")
) as { messages: { type: string }[] };

function captureClient(): { client: SessionClient; sent: string[] } {
  const sent: string[] = [];
  const client = new SessionClient({ send: (text) => sent.push(text) }, () => {});
  return { client, sent };
}

describe("client-emitted messages", () => {
  it("every send helper produces schema-valid envelopes", () => {
    const { client, sent } = captureClient();
    client.hello();
    client.fly(0.25, -1);
    client.pointer([0, 1, 2], [0, 0, -1]);
    client.select(3);
    client.deselect(3);
    client.jump(7);
    client.bookmark(9);
    client.switchView();
    client.submit({ ready: true });
    client.submit({ estimate: 12 });
    client.submit({ path: [1, 2, 3] });
    client.submit({ ray_origin: [0, 0, 0], ray_direction: [1, 0, 0] });
    client.submit({});
    client.questionnaire("ssq", new Array(16).fill(0));
    client.questionnaire("tlx", [10, 20, 30, 40, 50, 60]);

    expect(sent.length).toBe(15);
    let lastSeq = 0;
    for (const text of sent) {
      const envelope = envelopeSchema.parse(JSON.parse(text));
      expect(envelope.seq).toBeGreaterThan(lastSeq);
      lastSeq = envelope.seq;
      const schema = clientPayloads[envelope.type as ClientType];
      expect(schema, `unknown client type ${envelope.type}`).toBeDefined();
      expect(() => schema.parse(envelope.payload)).not.toThrow();
    }
  });

  it("rejects out-of-contract payloads before they reach the wire", () => {
    const { client } = captureClient();
    expect(() => client.fly(2.0, 0)).toThrow(); // axis out of range
    expect(() => client.select(-1)).toThrow(); // negative node id
    expect(() => client.submit({ estimate: -5 })).toThrow();
    expect(() => client.submit({ path: [] })).toThrow();
  });
});

describe("recorded server stream", () => {
  it("decodes every message in the bubble-jump fixture", () => {
    const types = new Set<string>();
    for (const raw of fixture.messages) {
      const msg = decodeServerMessage(JSON.stringify(raw));
      types.add(msg.type);
    }
    expect(types).toContain("scene.init");
    expect(types).toContain("view.state");
    expect(types).toContain("anim.update");
    expect(types).toContain("hud.info");
  });

  it("rejects unknown server types loudly", () => {
    expect(() =>
      decodeServerMessage(
        JSON.stringify({ type: "mystery", seq: 1, session_seconds: 0, payload: {} })
      )
    ).toThrow(/unknown server message type/);
  });
});
