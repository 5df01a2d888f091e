import type {
  ApiErrorBody,
  ClozeResponse,
  ConfabulateResponse,
  FocusResponse,
  HlsResponse,
  MemoryResponse,
  NarrateResponse,
  ShadowResponse,
  StateHashResponse,
} from "./types.js";

// Minimal transport abstraction so tests can inject a mock.
export interface HttpResponse {
  status: number;
  json(): Promise<unknown>;
}

export type HttpFn = (path: string, init?: { method?: string; body?: string; headers?: Record<string, string> }) => Promise<HttpResponse>;

export class ApiError extends Error {
  constructor(readonly status: number, readonly body: ApiErrorBody) {
    super(body.error?.message ?? `request failed with status ${status}`);
  }
}

async function unwrap<T>(response: HttpResponse): Promise<T> {
  if (response.status >= 200 && response.status < 300) {
    return (await response.json()) as T;
  }
  const body = (await response.json()) as ApiErrorBody;
  throw new ApiError(response.status, body);
}

export class ApiClient {
  constructor(private readonly http: HttpFn) {}

  private get<T>(path: string): Promise<T> {
    return this.http(path).then((r) => unwrap<T>(r));
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.http(path, {
      method: "POST",
      body: JSON.stringify(payload),
      headers: { "content-type": "application/json" },
    }).then((r) => unwrap<T>(r));
  }

  narrate(text: string): Promise<NarrateResponse> {
    return this.post("/api/narrate", { text });
  }

  focus(): Promise<FocusResponse> {
    return this.get("/api/focus");
  }

  shadow(id: number): Promise<ShadowResponse> {
    return this.get(`/api/shadow/${id}`);
  }

  hls(top: number): Promise<HlsResponse> {
    return this.get(`/api/hls?top=${top}`);
  }

  memory(): Promise<MemoryResponse> {
    return this.get("/api/memory");
  }

  stateHash(): Promise<StateHashResponse> {
    return this.get("/api/state/hash");
  }

  confabulate(steps: number): Promise<ConfabulateResponse> {
    return this.post("/api/confabulate", { steps });
  }

  cloze(position: number, top = 5): Promise<ClozeResponse> {
    return this.post("/api/cloze", { position, top });
  }
}
