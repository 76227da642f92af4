import { beforeEach, describe, expect, it, vi } from "vitest";

import { ApiClient, loadSettings, permIdFromQrPayload, saveSettings } from "../src/api.js";

function okJson(body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status: 200,
    headers: { "Content-Type": "application/json" },
  });
}

describe("ApiClient", () => {
  let calls: Array<{ url: string; init: RequestInit }>;

  beforeEach(() => {
    window.localStorage.clear();
    calls = [];
    vi.stubGlobal(
      "fetch",
      vi.fn(async (url: string, init: RequestInit = {}) => {
        calls.push({ url, init });
        return okJson({ ok: true, objects: [], datasets: [] });
      }),
    );
  });

  function headerOf(call: { init: RequestInit }): string | undefined {
    return (call.init.headers as Record<string, string> | undefined)?.["Authorization"];
  }

  it("attaches the bearer token to mutating requests", async () => {
    const api = new ApiClient({ baseUrl: "http://api", token: "sekrit" });
    await api.createLink("20260101000000000-1", "20260101000000000-2");
    expect(calls[0].url).toBe("http://api/links");
    expect(calls[0].init.method).toBe("POST");
    expect(headerOf(calls[0])).toBe("Bearer sekrit");
  });

  it("builds multipart uploads with all wizard fields", async () => {
    const api = new ApiClient({ baseUrl: "http://api", token: "sekrit" });
    await api.uploadDataset({
      file: new File([new Uint8Array([1])], "pillar.va"),
      entry: "20260101000000000-1",
      type: "SEM_IMAGE",
      format: "VendorA",
      dryRun: true,
    });
    const body = calls[0].init.body as FormData;
    expect(body.get("entry")).toBe("20260101000000000-1");
    expect(body.get("type")).toBe("SEM_IMAGE");
    expect(body.get("format")).toBe("VendorA");
    expect(body.get("dry_run")).toBe("true");
    expect((body.get("file") as File).name).toBe("pillar.va");
    expect(headerOf(calls[0])).toBe("Bearer sekrit");
  });

  it("logout clears the token from memory and storage", async () => {
    saveSettings({ baseUrl: "http://api", token: "sekrit" });
    const api = new ApiClient(loadSettings());
    api.logout();
    expect(api.settings.token).toBe("");
    expect(loadSettings().token).toBe("");
    await api.getObject("20260101000000000-1");
    expect(headerOf(calls[0])).toBeUndefined();
  });

  it("surfaces server error codes", async () => {
    vi.stubGlobal(
      "fetch",
      vi.fn(async () =>
        new Response(JSON.stringify({ error: { code: "CYCLE", message: "would create a cycle" } }), {
          status: 409,
        }),
      ),
    );
    const api = new ApiClient({ baseUrl: "http://api", token: "" });
    await expect(api.createLink("a", "b")).rejects.toMatchObject({
      status: 409,
      code: "CYCLE",
    });
  });

  it("settings round-trip through localStorage", () => {
    saveSettings({ baseUrl: "http://somewhere:8750", token: "abc" });
    expect(loadSettings()).toEqual({ baseUrl: "http://somewhere:8750", token: "abc" });
  });
});

describe("permIdFromQrPayload", () => {
  it("accepts exactly the QR payload grammar", () => {
    expect(permIdFromQrPayload("rdm://object/20231204123456789-42")).toBe(
      "20231204123456789-42",
    );
    expect(permIdFromQrPayload("  rdm://object/20231204123456789-42  ")).toBe(
      "20231204123456789-42",
    );
    expect(permIdFromQrPayload("http://evil")).toBeNull();
    expect(permIdFromQrPayload("rdm://object/not-an-id")).toBeNull();
    expect(permIdFromQrPayload("20231204123456789-42")).toBeNull();
  });
});
