// Client tests with a mocked fetch: URL construction, request bodies and
// error mapping. No network involved.

import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiRequestError, DevRecClient } from "../src/api.js";

const BASE = "http://test-host:9999";

function mockFetch(status = 200, body: unknown = {}) {
  const mock = vi.fn(async () => ({
    ok: status >= 200 && status < 300,
    status,
    json: async () => body,
  })) as unknown as typeof fetch;
  globalThis.fetch = mock;
  return mock as ReturnType<typeof vi.fn>;
}

afterEach(() => {
  vi.restoreAllMocks();
});

describe("DevRecClient urls", () => {
  it("builds search urls with every flag", async () => {
    const mock = mockFetch(200, { request: {}, results: [] });
    const client = new DevRecClient(BASE);
    await client.search("scrum tutorial", {
      user: "u1",
      k: 5,
      beta: 0.25,
      strict: true,
      tau: 0.4,
      expand: false,
    });
    const url = String(mock.mock.calls[0][0]);
    expect(url.startsWith(`${BASE}/search?`)).toBe(true);
    const params = new URL(url).searchParams;
    expect(params.get("q")).toBe("scrum tutorial");
    expect(params.get("user")).toBe("u1");
    expect(params.get("k")).toBe("5");
    expect(params.get("beta")).toBe("0.25");
    expect(params.get("strict")).toBe("true");
    expect(params.get("tau")).toBe("0.4");
    expect(params.get("expand")).toBe("false");
  });

  it("omits unset options entirely", async () => {
    const mock = mockFetch(200, { request: {}, results: [] });
    await new DevRecClient(BASE).search("kotlin");
    const params = new URL(String(mock.mock.calls[0][0])).searchParams;
    expect(params.get("q")).toBe("kotlin");
    expect(params.has("user")).toBe(false);
    expect(params.has("beta")).toBe(false);
  });

  it("uses dry_run=1 for decay previews", async () => {
    const mock = mockFetch(200, { request: {}, dry_run: true, interests: {} });
    await new DevRecClient(BASE).decay("u1", "2026-01-01T00:00:00+00:00", true);
    const url = new URL(String(mock.mock.calls[0][0]));
    expect(url.pathname).toBe("/profile/u1/decay");
    expect(url.searchParams.get("dry_run")).toBe("1");
    expect(url.searchParams.get("now")).toBe("2026-01-01T00:00:00+00:00");
  });

  it("POSTs feedback as json", async () => {
    const mock = mockFetch(200, { request: {}, interests: {} });
    await new DevRecClient(BASE).feedback("u1", "tweet:1", "relevant");
    const [url, init] = mock.mock.calls[0] as [string, RequestInit];
    expect(String(url)).toBe(`${BASE}/feedback`);
    expect(init.method).toBe("POST");
    expect(JSON.parse(String(init.body))).toEqual({
      user: "u1",
      artifact: "tweet:1",
      signal: "relevant",
    });
  });

  it("escapes user ids in paths", async () => {
    const mock = mockFetch(200, {});
    await new DevRecClient(BASE).profile("we/ird");
    expect(String(mock.mock.calls[0][0])).toBe(`${BASE}/profile/we%2Fird`);
  });
});

describe("error mapping", () => {
  it("raises ApiRequestError with the service error code", async () => {
    mockFetch(404, { error: "unknown_user", detail: "no profile for 'ghost'" });
    const client = new DevRecClient(BASE);
    const failure = await client.profile("ghost").catch((e) => e);
    expect(failure).toBeInstanceOf(ApiRequestError);
    expect(failure.status).toBe(404);
    expect(failure.code).toBe("unknown_user");
    expect(failure.message).toContain("ghost");
  });

  it("falls back to a generic code for non-json errors", async () => {
    const mock = vi.fn(async () => ({
      ok: false,
      status: 502,
      json: async () => {
        throw new Error("not json");
      },
    })) as unknown as typeof fetch;
    globalThis.fetch = mock;
    const failure = await new DevRecClient(BASE).health().catch((e) => e);
    expect(failure.code).toBe("http_error");
    expect(failure.status).toBe(502);
  });
});
