/** Typed client for the workbench HTTP API.
 *
 * Every mutating request carries the bearer token; reads carry it too when
 * configured (the server may or may not allow public reads). The client
 * never transforms scientific values: callers receive the server's JSON
 * verbatim.
 */

import type {
  DatasetJson,
  Direction,
  GraphJson,
  ObjectJson,
  ParseResultJson,
  VocabularyJson,
} from "./types.js";

export interface ApiSettings {
  baseUrl: string;
  token: string;
}

const SETTINGS_KEY = "provlab.settings";

export function loadSettings(): ApiSettings {
  try {
    const raw = window.localStorage.getItem(SETTINGS_KEY);
    if (raw) {
      const parsed = JSON.parse(raw) as Partial<ApiSettings>;
      return { baseUrl: parsed.baseUrl ?? "", token: parsed.token ?? "" };
    }
  } catch {
    // fall through to defaults
  }
  return { baseUrl: "", token: "" };
}

export function saveSettings(settings: ApiSettings): void {
  window.localStorage.setItem(SETTINGS_KEY, JSON.stringify(settings));
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

export class ApiClient {
  constructor(public settings: ApiSettings) {}

  /** Clear the bearer token from memory and persisted settings. */
  logout(): void {
    this.settings = { ...this.settings, token: "" };
    saveSettings(this.settings);
  }

  private headers(extra: Record<string, string> = {}): Record<string, string> {
    const headers: Record<string, string> = { ...extra };
    if (this.settings.token) {
      headers["Authorization"] = `Bearer ${this.settings.token}`;
    }
    return headers;
  }

  private async request(path: string, init: RequestInit = {}): Promise<Response> {
    const response = await fetch(this.settings.baseUrl + path, init);
    if (!response.ok) {
      let code = `HTTP_${response.status}`;
      let message = response.statusText;
      try {
        const body = (await response.json()) as { error?: { code: string; message: string } };
        if (body.error) {
          code = body.error.code;
          message = body.error.message;
        }
      } catch {
        // non-JSON error body
      }
      throw new ApiError(response.status, code, message);
    }
    return response;
  }

  private async getJson<T>(path: string): Promise<T> {
    const response = await this.request(path, { headers: this.headers() });
    return (await response.json()) as T;
  }

  private async postJson<T>(path: string, body: unknown): Promise<T> {
    const response = await this.request(path, {
      method: "POST",
      headers: this.headers({ "Content-Type": "application/json" }),
      body: JSON.stringify(body),
    });
    return (await response.json()) as T;
  }

  getGraph(params: {
    root?: string;
    element?: string;
    direction?: Direction;
    depth?: number | null;
  }): Promise<GraphJson> {
    const query = new URLSearchParams();
    if (params.element) query.set("element", params.element);
    if (params.root) query.set("root", params.root);
    if (params.direction) query.set("direction", params.direction);
    if (params.depth != null) query.set("depth", String(params.depth));
    return this.getJson<GraphJson>(`/graph?${query.toString()}`);
  }

  getObject(permId: string): Promise<ObjectJson> {
    return this.getJson<ObjectJson>(`/objects/${encodeURIComponent(permId)}`);
  }

  async searchObjects(q: string, type?: string): Promise<ObjectJson[]> {
    const query = new URLSearchParams({ q });
    if (type) query.set("type", type);
    const body = await this.getJson<{ objects: ObjectJson[] }>(`/objects?${query.toString()}`);
    return body.objects;
  }

  createLink(parent: string, child: string): Promise<unknown> {
    return this.postJson("/links", { parent, child });
  }

  getVocabulary(name: string): Promise<VocabularyJson> {
    return this.getJson<VocabularyJson>(`/vocabularies/${encodeURIComponent(name)}`);
  }

  async listDatasets(entry: string): Promise<DatasetJson[]> {
    const body = await this.getJson<{ datasets: DatasetJson[] }>(
      `/datasets?entry=${encodeURIComponent(entry)}`,
    );
    return body.datasets;
  }

  /** Upload a file; with dryRun the server parses and returns the result
   * without registering anything. */
  async uploadDataset(options: {
    file: File;
    entry: string;
    type: string;
    format: string;
    dryRun?: boolean;
  }): Promise<ParseResultJson | DatasetJson> {
    const form = new FormData();
    form.set("file", options.file);
    form.set("entry", options.entry);
    form.set("type", options.type);
    form.set("format", options.format);
    form.set("dry_run", options.dryRun ? "true" : "false");
    const response = await this.request("/datasets", {
      method: "POST",
      headers: this.headers(),
      body: form,
    });
    return (await response.json()) as ParseResultJson | DatasetJson;
  }

  /** Fetch a dataset preview as a Blob, or null when none exists. */
  async fetchPreview(datasetId: string): Promise<Blob | null> {
    try {
      const response = await this.request(
        `/datasets/${encodeURIComponent(datasetId)}/preview`,
        { headers: this.headers() },
      );
      return await response.blob();
    } catch (error) {
      if (error instanceof ApiError && error.status === 404) return null;
      throw error;
    }
  }

  async createDeck(datasetIds: string[], title: string): Promise<Blob> {
    const response = await this.request("/decks", {
      method: "POST",
      headers: this.headers({ "Content-Type": "application/json" }),
      body: JSON.stringify({ dataset_ids: datasetIds, title }),
    });
    return await response.blob();
  }

  async qrPayload(permId: string): Promise<string> {
    const response = await this.request(`/qr/${encodeURIComponent(permId)}`, {
      headers: this.headers(),
    });
    return await response.text();
  }

  runTick(): Promise<{ job: string }> {
    return this.postJson<{ job: string }>("/workflows/tick", {});
  }

  jobStatus(job: string): Promise<{ state: string; outcomes: unknown[] }> {
    return this.getJson(`/workflows/status/${encodeURIComponent(job)}`);
  }
}

const QR_PREFIX = "rdm://object/";

/** Resolve a pasted QR payload to a permId, or null if it is not one. */
export function permIdFromQrPayload(payload: string): string | null {
  const trimmed = payload.trim();
  if (!trimmed.startsWith(QR_PREFIX)) return null;
  const permId = trimmed.slice(QR_PREFIX.length);
  return /^\d{17}-[1-9]\d*$/.test(permId) ? permId : null;
}
