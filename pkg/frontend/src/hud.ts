/**
 * Controller-style HUD: current user node label and degree, plus the
 * bookmark / view-switch / geodesic-toggle buttons and the status line.
 */

import type { ClientSceneModel } from "./model";
import type { SessionClient } from "./net";

export class Hud {
  private info: HTMLDivElement;
  private status: HTMLDivElement;
  onGeodesicToggle: (() => void) | null = null;
  onBookmark: (() => void) | null = null;

  constructor(parent: HTMLElement, model: ClientSceneModel, client: SessionClient) {
    const bar = document.createElement("div");
    bar.id = "hud";
    parent.appendChild(bar);

    this.info = document.createElement("div");
    this.info.className = "hud-info";
    bar.appendChild(this.info);

    const buttons = document.createElement("div");
    buttons.className = "hud-buttons";
    bar.appendChild(buttons);

    const mk = (label: string, onClick: () => void) => {
      const b = document.createElement("button");
      b.textContent = label;
      b.addEventListener("click", onClick);
      buttons.appendChild(b);
      return b;
    };
    mk("Bookmark node", () => this.onBookmark?.());
    mk("Switch overview/detail", () => client.switchView());
    mk("Geodesic colors", () => {
      model.geodesicOn = !model.geodesicOn;
      this.onGeodesicToggle?.();
    });

    this.status = document.createElement("div");
    this.status.className = "hud-status";
    bar.appendChild(this.status);
  }

  update(model: ClientSceneModel): void {
    this.info.textContent = model.hud
      ? `you are ${model.hud.label} (${model.hud.degree} neighbors)`
      : "not associated with a node";
    this.status.textContent = model.lastError ? `server: ${model.lastError}` : "";
  }
}
