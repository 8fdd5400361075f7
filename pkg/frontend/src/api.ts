import type { DecisionBody, ItemsPage, LabelSet, Progress, ReviewItem, Status } from "./types.js";

// Minimal fetch shape so tests can inject a mock backend.
export interface FetchResponse {
  status: number;
  json(): Promise<unknown>;
}

export type Fetcher = (
  url: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<FetchResponse>;

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number,
  ) {
    super(message);
  }
}

async function parseError(resp: FetchResponse): Promise<ApiError> {
  let message = `HTTP ${resp.status}`;
  try {
    const body = (await resp.json()) as { error?: string };
    if (body && typeof body.error === "string") message = body.error;
  } catch {
    // response body was not JSON; keep the status message
  }
  return new ApiError(message, resp.status);
}

export class ApiClient {
  constructor(
    private fetcher: Fetcher,
    private base = "",
  ) {}

  private async get<T>(path: string): Promise<T> {
    const resp = await this.fetcher(this.base + path);
    if (resp.status !== 200) throw await parseError(resp);
    return (await resp.json()) as T;
  }

  items(filter: Status | null = null, offset = 0, limit = 50): Promise<ItemsPage> {
    const params = new URLSearchParams({ offset: String(offset), limit: String(limit) });
    if (filter) params.set("status", filter);
    return this.get<ItemsPage>(`/api/items?${params.toString()}`);
  }

  item(spanId: string): Promise<ReviewItem> {
    return this.get<ReviewItem>(`/api/items/${encodeURIComponent(spanId)}`);
  }

  progress(): Promise<Progress> {
    return this.get<Progress>("/api/progress");
  }

  labels(): Promise<LabelSet> {
    return this.get<LabelSet>("/api/labels");
  }

  exportUrl(): string {
    return `${this.base}/api/export`;
  }

  async decide(spanId: string, body: DecisionBody): Promise<ReviewItem> {
    const resp = await this.fetcher(
      `${this.base}/api/items/${encodeURIComponent(spanId)}/decision`,
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(body),
      },
    );
    if (resp.status !== 200) throw await parseError(resp);
    return (await resp.json()) as ReviewItem;
  }
}
