// Typed client for the devrec HTTP API. Every state change in the UI goes
// through these methods; there is no other backend.

import type {
  DecayResponse,
  FeedbackResponse,
  FeedbackSignal,
  HealthResponse,
  ProfileResponse,
  RecommendResponse,
  SearchOptions,
  SearchResponse,
} from "./types.js";

export class ApiRequestError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    detail: string,
  ) {
    super(detail);
  }
}

async function parseResponse<T>(response: Response): Promise<T> {
  const body = await response.json().catch(() => null);
  if (!response.ok) {
    const code = body && typeof body.error === "string" ? body.error : "http_error";
    const detail =
      body && typeof body.detail === "string"
        ? body.detail
        : `request failed with status ${response.status}`;
    throw new ApiRequestError(response.status, code, detail);
  }
  return body as T;
}

export class DevRecClient {
  constructor(readonly baseUrl: string) {}

  private url(path: string, params?: Record<string, string | number | boolean | undefined>): string {
    const query = new URLSearchParams();
    if (params) {
      for (const [key, value] of Object.entries(params)) {
        if (value !== undefined) {
          query.set(key, String(value));
        }
      }
    }
    const suffix = query.toString();
    return `${this.baseUrl}${path}${suffix ? `?${suffix}` : ""}`;
  }

  private async post<T>(path: string, body: unknown, params?: Record<string, string | number | boolean | undefined>): Promise<T> {
    const response = await fetch(this.url(path, params), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    return parseResponse<T>(response);
  }

  async health(): Promise<HealthResponse> {
    return parseResponse(await fetch(this.url("/health")));
  }

  async search(q: string, options: SearchOptions = {}): Promise<SearchResponse> {
    const response = await fetch(
      this.url("/search", {
        q,
        user: options.user,
        k: options.k,
        beta: options.beta,
        strict: options.strict,
        tau: options.tau,
        expand: options.expand,
      }),
    );
    return parseResponse(response);
  }

  async recommend(user: string, k?: number): Promise<RecommendResponse> {
    return parseResponse(await fetch(this.url("/recommend", { user, k })));
  }

  async profile(user: string): Promise<ProfileResponse> {
    return parseResponse(await fetch(this.url(`/profile/${encodeURIComponent(user)}`)));
  }

  async createProfile(form: Record<string, unknown>): Promise<{ created: string }> {
    return this.post("/profile", form);
  }

  async feedback(
    user: string,
    artifact: string,
    signal: FeedbackSignal,
  ): Promise<FeedbackResponse> {
    return this.post("/feedback", { user, artifact, signal });
  }

  async ingestPosts(user: string, posts: { body: string; title?: string }[]): Promise<FeedbackResponse> {
    return this.post(`/posts/${encodeURIComponent(user)}`, { posts });
  }

  async decay(user: string, now?: string, dryRun = true): Promise<DecayResponse> {
    return this.post(`/profile/${encodeURIComponent(user)}/decay`, undefined, {
      now,
      dry_run: dryRun ? "1" : "0",
    });
  }

  async artifact(id: string): Promise<Record<string, unknown>> {
    return parseResponse(await fetch(this.url(`/artifact/${encodeURIComponent(id)}`)));
  }
}
