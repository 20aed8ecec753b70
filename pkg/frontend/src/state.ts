/** UI state and transitions, kept framework-free so they test in isolation.
 *
 * Invariants:
 *  - the distance list and the tab order share one source (state.results);
 *  - at most one query is in flight, a newer submit or a clear discards any
 *    older response (generation counter);
 *  - status polling never clears results.
 */

import { ApiError, GeniusClient, RankedScenario, ServiceStatus } from "./api.js";

export interface UiState {
  queryText: string;
  results: RankedScenario[];
  hasResults: boolean;
  selectedTab: number;
  status: ServiceStatus | null;
  reachable: boolean;
  banner: string | null;
  busy: boolean;
}

export function initialState(): UiState {
  return {
    queryText: "",
    results: [],
    hasResults: false,
    selectedTab: 0,
    status: null,
    reachable: true,
    banner: null,
    busy: false,
  };
}

export type Listener = (state: UiState) => void;

export class UiController {
  private state: UiState = initialState();
  private listeners: Listener[] = [];
  private generation = 0;

  constructor(
    private readonly client: GeniusClient,
    private readonly resultCount = 10,
  ) {}

  getState(): UiState {
    return this.state;
  }

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
    listener(this.state);
  }

  private update(patch: Partial<UiState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) listener(this.state);
  }

  setQueryText(text: string): void {
    this.update({ queryText: text });
  }

  selectTab(index: number): void {
    if (this.state.hasResults && index >= 0 && index < this.state.results.length) {
      this.update({ selectedTab: index });
    }
  }

  /** Send the current query; stale responses are ignored, errors keep the
   * previous results and surface as a banner with the status code. */
  async submit(): Promise<void> {
    const text = this.state.queryText.trim();
    if (!text) return;
    const myGeneration = ++this.generation;
    this.update({ busy: true, banner: null });
    try {
      const result = await this.client.query(text, this.resultCount);
      if (myGeneration !== this.generation) return; // cancelled or superseded
      this.update({
        results: result.results,
        hasResults: true,
        selectedTab: 0,
        busy: false,
      });
    } catch (error) {
      if (myGeneration !== this.generation) return;
      const banner =
        error instanceof ApiError
          ? `query failed: HTTP ${error.status} — ${error.message}`
          : `query failed: service unreachable`;
      this.update({ busy: false, banner });
    }
  }

  /** Reset query field, tabs, and distance list; status stays untouched and
   * any in-flight request's response is discarded. */
  clear(): void {
    this.generation++;
    this.update({
      queryText: "",
      results: [],
      hasResults: false,
      selectedTab: 0,
      banner: null,
      busy: false,
    });
  }

  /** One status-poll tick; network failure marks the service unreachable
   * without clearing results. */
  async pollStatus(): Promise<void> {
    try {
      const status = await this.client.status();
      this.update({ status, reachable: true });
    } catch {
      this.update({ reachable: false });
    }
  }
}
