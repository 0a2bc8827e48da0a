// Thin typed client over the service API. The base URL is the single
// configuration point; every server interaction in the app goes through
// this module so state mutation is impossible except via API events.

import type {
  ApiErrorBody,
  DatasetInfo,
  DocumentView,
  EventAck,
  LayoutInfo,
  LayoutPoint,
  SampleId,
  SessionView,
} from "./types.js";

export class ApiError extends Error {
  readonly status: number;
  readonly code: string;

  constructor(body: ApiErrorBody) {
    super(body.message);
    this.status = body.status;
    this.code = body.code;
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    if (!response.ok) {
      let body: ApiErrorBody;
      try {
        body = (await response.json()) as ApiErrorBody;
      } catch {
        body = { status: response.status, code: "error", message: response.statusText };
      }
      throw new ApiError(body);
    }
    return (await response.json()) as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  listDatasets(): Promise<DatasetInfo[]> {
    return this.request("/api/datasets");
  }

  listLayouts(): Promise<LayoutInfo[]> {
    return this.request("/api/layouts");
  }

  layoutPoints(layoutId: string, options?: { label?: string; session?: string }): Promise<LayoutPoint[]> {
    const params = new URLSearchParams();
    if (options?.label) params.set("label", options.label);
    if (options?.session) params.set("session", options.session);
    const query = params.toString();
    return this.request(`/api/layouts/${encodeURIComponent(layoutId)}/points${query ? `?${query}` : ""}`);
  }

  getDocument(dataset: string, docId: SampleId): Promise<DocumentView> {
    return this.request(`/api/datasets/${encodeURIComponent(dataset)}/documents/${docId}`);
  }

  imageUrl(dataset: string, index: number, scale = 8): string {
    return `${this.baseUrl}/api/datasets/${encodeURIComponent(dataset)}/images/${index}?scale=${scale}`;
  }

  getSession(sessionId: string): Promise<SessionView> {
    return this.request(`/api/sessions/${encodeURIComponent(sessionId)}`);
  }

  createSession(body: {
    dataset: string;
    label: string;
    strategy?: Record<string, unknown> | string;
    session_id?: string;
    layout?: string;
  }): Promise<{ id: string; queue_length: number; ordinal: number }> {
    return this.post("/api/sessions", body);
  }

  postEvent(
    sessionId: string,
    type: string,
    payload: Record<string, unknown>,
    expectedOrdinal?: number,
  ): Promise<EventAck> {
    return this.post(`/api/sessions/${encodeURIComponent(sessionId)}/events`, {
      type,
      payload,
      expected_ordinal: expectedOrdinal,
    });
  }

  neighbors(params: {
    layout: string;
    anchor: SampleId;
    space?: string;
    comparison?: SampleId;
  }): Promise<Record<string, unknown>> {
    const query = new URLSearchParams({ layout: params.layout, anchor: String(params.anchor) });
    if (params.space) query.set("space", params.space);
    if (params.comparison !== undefined) query.set("comparison", String(params.comparison));
    return this.request(`/api/neighbors?${query.toString()}`);
  }
}
