/**
 * Task panel: shows the active prompt and collects the kind-specific
 * response. Node picks go through normal scene clicks; this panel owns the
 * typed inputs (degree estimate, ordered path, ready/point buttons).
 */

import type { ClientSceneModel } from "./model";
import type { SessionClient } from "./net";

export class TaskPanel {
  private root: HTMLDivElement;
  private pathDraft: number[] = [];
  getRay: (() => { origin: [number, number, number]; direction: [number, number, number] }) | null =
    null;

  constructor(
    parent: HTMLElement,
    private readonly model: ClientSceneModel,
    private readonly client: SessionClient
  ) {
    this.root = document.createElement("div");
    this.root.id = "task-panel";
    parent.appendChild(this.root);
  }

  /** FiP responses are built by clicking nodes while the panel is open. */
  addPathNode(node: number): void {
    if (this.model.prompt?.kind === "FiP") {
      this.pathDraft.push(node);
      this.render();
    }
  }

  render(): void {
    const prompt = this.model.prompt;
    this.root.innerHTML = "";
    if (!prompt) {
      this.root.style.display = "none";
      return;
    }
    this.root.style.display = "block";

    const title = document.createElement("div");
    title.className = "task-title";
    title.textContent = `Task ${(prompt.index as number) + 1}: ${prompt.kind}`;
    this.root.appendChild(title);

    const text = document.createElement("div");
    text.className = "task-instruction";
    text.textContent = String(prompt.instruction ?? "");
    this.root.appendChild(text);

    switch (prompt.kind) {
      case "FCN": {
        this.button("Submit selection", () => this.client.submit({}));
        break;
      }
      case "END": {
        const input = document.createElement("input");
        input.type = "number";
        input.min = "0";
        input.step = "1";
        input.placeholder = "neighbor count";
        this.root.appendChild(input);
        this.button("Submit estimate", () => {
          const value = Math.floor(Number(input.value));
          if (!Number.isFinite(value) || value < 0) {
            input.classList.add("invalid"); // negatives never reach the wire
            return;
          }
          this.client.submit({ estimate: value });
        });
        break;
      }
      case "SO_OD": {
        if ((prompt as { phase?: string }).phase !== "point") {
          this.button("Ready: take me to the start node", () =>
            this.client.submit({ ready: true })
          );
          break;
        }
        this.pointButton("Submit direction to the end node");
        break;
      }
      case "SO_DD":
        this.pointButton("Submit direction to the path start");
        break;
      case "SO_DO":
        this.pointButton("Submit direction to the path end");
        break;
      case "FiP": {
        const draft = document.createElement("div");
        draft.className = "path-draft";
        const labels = this.model.scene?.graph.labels ?? [];
        draft.textContent =
          this.pathDraft.length === 0
            ? "click nodes in order to build the path"
            : this.pathDraft.map((n) => labels[n] ?? String(n)).join(" > ");
        this.root.appendChild(draft);
        this.button("Undo", () => {
          this.pathDraft.pop();
          this.render();
        });
        this.button("Report path", () => {
          if (this.pathDraft.length > 0) {
            this.client.submit({ path: [...this.pathDraft] });
            this.pathDraft = [];
          }
        });
        break;
      }
      // FiN and FoP complete through scene clicks alone
    }
  }

  private button(label: string, onClick: () => void): void {
    const b = document.createElement("button");
    b.textContent = label;
    b.addEventListener("click", onClick);
    this.root.appendChild(b);
  }

  private pointButton(label: string): void {
    this.button(label, () => {
      const ray = this.getRay?.();
      if (ray) {
        this.client.submit({ ray_origin: ray.origin, ray_direction: ray.direction });
      }
    });
  }
}
