/** DOM rendering for the four interface windows. */

import { RankedScenario } from "./api.js";
import { UiState } from "./state.js";

export interface Panels {
  tabBar: HTMLElement;
  tabBody: HTMLElement;
  distanceList: HTMLElement;
  statusIndicator: HTMLElement;
  banner: HTMLElement;
}

export function formatDistance(distance: number): string {
  return distance.toFixed(4);
}

function timestampLabel(epochSeconds: number): string {
  return new Date(epochSeconds * 1000).toISOString().replace(".000Z", "Z");
}

function renderTabBar(
  element: HTMLElement,
  results: RankedScenario[],
  selected: number,
  onSelect: (index: number) => void,
): void {
  element.textContent = "";
  results.forEach((hit, index) => {
    const button = document.createElement("button");
    button.type = "button";
    button.className = "tab" + (index === selected ? " active" : "");
    button.dataset.index = String(index);
    button.textContent = `${index + 1}. ${hit.id}`;
    button.addEventListener("click", () => onSelect(index));
    element.appendChild(button);
  });
}

function renderTabBody(element: HTMLElement, hit: RankedScenario | undefined): void {
  element.textContent = "";
  if (!hit) {
    const placeholder = document.createElement("p");
    placeholder.className = "placeholder";
    placeholder.textContent = "No scenarios yet — send a query.";
    element.appendChild(placeholder);
    return;
  }
  const description = document.createElement("p");
  description.className = "description";
  description.textContent = hit.description;

  const table = document.createElement("dl");
  table.className = "metadata";
  const fields: Array<[string, string]> = [
    ["ID", hit.id],
    ["Distance", formatDistance(hit.distance)],
    ["Timestamp", timestampLabel(hit.metadata.window_start)],
    ["Vehicle", hit.metadata.vehicle],
    ["Log", hit.metadata.log_id],
  ];
  for (const [label, value] of fields) {
    const dt = document.createElement("dt");
    dt.textContent = label;
    const dd = document.createElement("dd");
    dd.textContent = value;
    table.append(dt, dd);
  }

  const link = document.createElement("a");
  link.className = "scenario-link";
  link.href = hit.metadata.link;
  link.target = "_blank";
  link.rel = "noopener";
  link.textContent = "Open in visualization tool";

  element.append(description, table, link);
}

function renderDistanceList(
  element: HTMLElement,
  results: RankedScenario[],
  selected: number,
  onSelect: (index: number) => void,
): void {
  element.textContent = "";
  if (!results.length) {
    const placeholder = document.createElement("li");
    placeholder.className = "placeholder";
    placeholder.textContent = "No distances to show.";
    element.appendChild(placeholder);
    return;
  }
  results.forEach((hit, index) => {
    const row = document.createElement("li");
    row.className = "distance-row" + (index === selected ? " active" : "");
    row.dataset.index = String(index);
    row.textContent = `#${index + 1}  ${formatDistance(hit.distance)}  ${hit.id}`;
    row.addEventListener("click", () => onSelect(index));
    element.appendChild(row);
  });
}

function renderStatus(element: HTMLElement, state: UiState): void {
  let label: string;
  let css: string;
  if (!state.reachable) {
    label = "unreachable";
    css = "unreachable";
  } else if (!state.status) {
    label = "connecting…";
    css = "loading";
  } else {
    css = state.status.state;
    label =
      state.status.state === "ok"
        ? `ok — ${state.status.record_count} scenarios`
        : state.status.state;
  }
  element.className = `status ${css}`;
  element.textContent = label;
}

export function renderAll(
  panels: Panels,
  state: UiState,
  onSelect: (index: number) => void,
): void {
  renderTabBar(panels.tabBar, state.results, state.selectedTab, onSelect);
  renderTabBody(panels.tabBody, state.results[state.selectedTab]);
  renderDistanceList(panels.distanceList, state.results, state.selectedTab, onSelect);
  renderStatus(panels.statusIndicator, state);
  panels.banner.textContent = state.banner ?? "";
  panels.banner.classList.toggle("visible", state.banner !== null);
}
