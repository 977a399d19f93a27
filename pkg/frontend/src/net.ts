/**
 * WebSocket client: typed senders with one outgoing sequence counter.
 *
 * Every outgoing payload goes through the protocol schemas before it hits
 * the wire, so a schema violation fails loudly at the call site instead of
 * as a server error message.
 */

import {
  type ClientType,
  decodeServerMessage,
  encodeClientMessage,
  type ServerMessage,
} from "./protocol";

export type Transport = {
  send(text: string): void;
};

export class SessionClient {
  private seq = 0;
  private t0 = performance.now();

  constructor(
    private readonly transport: Transport,
    private readonly onMessage: (msg: ServerMessage) => void
  ) {}

  sessionSeconds(): number {
    return (performance.now() - this.t0) / 1000.0;
  }

  send(type: ClientType, payload: unknown): void {
    this.seq += 1;
    this.transport.send(encodeClientMessage(type, this.seq, this.sessionSeconds(), payload));
  }

  receive(text: string): void {
    this.onMessage(decodeServerMessage(text));
  }

  hello(): void {
    this.send("hello", { client: "egograph-viewer/0.1" });
  }
  fly(axisX: number, axisY: number): void {
    this.send("input.fly", { axis_x: axisX, axis_y: axisY });
  }
  pointer(origin: [number, number, number], direction: [number, number, number]): void {
    this.send("input.pointer", { origin, direction });
  }
  select(node: number): void {
    this.send("action.select", { node });
  }
  deselect(node: number): void {
    this.send("action.deselect", { node });
  }
  jump(node: number): void {
    this.send("action.jump", { node });
  }
  bookmark(node: number): void {
    this.send("action.bookmark", { node });
  }
  switchView(): void {
    this.send("action.switch_view", {});
  }
  submit(payload: unknown): void {
    this.send("task.submit", payload);
  }
  questionnaire(instrument: "ssq" | "tlx", items: number[]): void {
    this.send("questionnaire.submit", { instrument, items });
  }
}

export function connect(url: string, onMessage: (msg: ServerMessage) => void): Promise<SessionClient> {
  return new Promise((resolve, reject) => {
    const socket = new WebSocket(url);
    const client = new SessionClient({ send: (text) => socket.send(text) }, onMessage);
    socket.onopen = () => resolve(client);
    socket.onerror = (event) => reject(event);
    socket.onmessage = (event) => client.receive(String(event.data));
  });
}
