import { readFileSync } from "node:fs";
import { join } from "node:path";

import type { ApiClient } from "../src/api.js";
import type { GraphJson } from "../src/types.js";

// vitest runs with the frontend directory as cwd
const FIXTURES = join(process.cwd(), "tests", "fixtures");

export function fixture<T>(name: string): T {
  return JSON.parse(readFileSync(join(FIXTURES, name), "utf-8")) as T;
}

export function fixtureText(name: string): string {
  return readFileSync(join(FIXTURES, name), "utf-8");
}

export function graphFixture(name: string): GraphJson {
  return fixture<GraphJson>(name);
}

/** Build a structurally-typed stand-in for ApiClient. */
export function fakeApi(overrides: Partial<Record<keyof ApiClient, unknown>>): ApiClient {
  return overrides as unknown as ApiClient;
}

export function mount(): HTMLElement {
  const container = document.createElement("div");
  document.body.appendChild(container);
  return container;
}
