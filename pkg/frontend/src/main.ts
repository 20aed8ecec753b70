/** Page wiring: event listeners and the 2-second status poll. */

import { GeniusClient } from "./api.js";
import { Panels, renderAll } from "./render.js";
import { UiController } from "./state.js";

export const STATUS_POLL_INTERVAL_MS = 2000;

export interface AppHandle {
  controller: UiController;
  stopPolling: () => void;
}

/** Wire the app into a document that contains the expected element ids.
 * Exported so tests can mount it on a jsdom document against any base URL. */
export function mountApp(
  root: Document,
  baseUrl = "",
  pollIntervalMs = STATUS_POLL_INTERVAL_MS,
): AppHandle {
  const byId = (id: string): HTMLElement => {
    const element = root.getElementById(id);
    if (!element) throw new Error(`missing #${id} in page`);
    return element;
  };

  const queryInput = byId("query-input") as HTMLInputElement;
  const sendButton = byId("send-button") as HTMLButtonElement;
  const clearButton = byId("clear-button") as HTMLButtonElement;
  const panels: Panels = {
    tabBar: byId("tab-bar"),
    tabBody: byId("tab-body"),
    distanceList: byId("distance-list"),
    statusIndicator: byId("status-indicator"),
    banner: byId("banner"),
  };

  const controller = new UiController(new GeniusClient(baseUrl));
  const onSelect = (index: number) => controller.selectTab(index);

  controller.subscribe((state) => {
    renderAll(panels, state, onSelect);
    sendButton.disabled = state.busy;
    if (queryInput.value !== state.queryText) queryInput.value = state.queryText;
  });

  queryInput.addEventListener("input", () => controller.setQueryText(queryInput.value));
  queryInput.addEventListener("keydown", (event) => {
    if ((event as KeyboardEvent).key === "Enter") {
      event.preventDefault();
      void controller.submit();
    }
  });
  sendButton.addEventListener("click", () => void controller.submit());
  clearButton.addEventListener("click", () => controller.clear());

  void controller.pollStatus();
  const timer = setInterval(() => void controller.pollStatus(), pollIntervalMs);

  return { controller, stopPolling: () => clearInterval(timer) };
}

declare global {
  interface Window {
    GENIUS_API_BASE?: string;
  }
}

// auto-mount in the browser; tests import mountApp directly instead
if (typeof window !== "undefined" && window.document.getElementById("query-input")) {
  mountApp(window.document, window.GENIUS_API_BASE ?? "");
}
