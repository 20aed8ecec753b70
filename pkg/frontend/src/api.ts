/** Typed client for the three retrieval-service endpoints. */

export interface ScenarioMetadata {
  vehicle: string;
  log_id: string;
  window_start: number;
  link: string;
}

export interface RankedScenario {
  id: string;
  distance: number;
  description: string;
  metadata: ScenarioMetadata;
}

export interface QueryResult {
  query: string;
  results: RankedScenario[];
}

export type ServiceStateName = "ok" | "degraded" | "loading";

export interface ServiceStatus {
  state: ServiceStateName;
  collection_name: string;
  record_count: number;
  embedder_id: string;
  uptime_s: number;
}

export interface ScenarioDetail {
  id: string;
  description: string;
  metadata: ScenarioMetadata;
}

/** Non-2xx reply; carries the HTTP status for banner display. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function parseError(response: Response): Promise<ApiError> {
  let detail = response.statusText || "request failed";
  try {
    const body = (await response.json()) as { error?: string; state?: string };
    if (body.error) detail = body.error;
    if (body.state) detail += ` (state: ${body.state})`;
  } catch {
    // non-JSON error body: keep the status text
  }
  return new ApiError(response.status, detail);
}

export class GeniusClient {
  constructor(private readonly baseUrl: string = "") {}

  /** The UI never mutates server state; these are the only three calls. */

  async query(text: string, n = 10, signal?: AbortSignal): Promise<QueryResult> {
    const response = await fetch(`${this.baseUrl}/api/query`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ text, n }),
      signal,
    });
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as QueryResult;
  }

  async status(signal?: AbortSignal): Promise<ServiceStatus> {
    const response = await fetch(`${this.baseUrl}/api/status`, { signal });
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as ServiceStatus;
  }

  async scenario(id: string, signal?: AbortSignal): Promise<ScenarioDetail> {
    const encoded = encodeURIComponent(id);
    const response = await fetch(`${this.baseUrl}/api/scenario/${encoded}`, { signal });
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as ScenarioDetail;
  }
}
