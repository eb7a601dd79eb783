/** A fetch implementation backed by the recorded API responses.
 *
 * GET requests replay the snapshot verbatim, so every number a view
 * shows is traceable to a recorded response field. Label PATCHes are
 * emulated with the same semantics as the live service (the new label
 * persists for later GETs), and anything unrecorded gets the service's
 * 404 error envelope.
 */

import type { FetchLike } from "../src/api.js";
import type { ConceptDetail, ConceptList } from "../src/types.js";
import recorded from "../fixtures/api.json";

export interface KnownTopWord {
  sentence_id: number;
  top_word: number;
  top_surface: string;
}

interface Fixture {
  project_id: string;
  known_top_words: KnownTopWord[];
  responses: Record<string, unknown>;
}

const fixture = recorded as unknown as Fixture;

export const PROJECT_ID = fixture.project_id;
export const KNOWN_TOP_WORDS = fixture.known_top_words;

export function recordedResponse<T>(path: string): T {
  const body = fixture.responses[path];
  if (body === undefined) throw new Error(`not recorded: ${path}`);
  return JSON.parse(JSON.stringify(body)) as T;
}

export interface RequestLogEntry {
  method: string;
  path: string;
  body: string | null;
}

export interface Responder {
  status: number;
  body: unknown;
  /** Simulate a response whose body is not JSON. */
  jsonThrows?: boolean;
}

export interface FixtureServer {
  fetch: FetchLike;
  requests: RequestLogEntry[];
}

function fakeResponse(responder: Responder): Response {
  return {
    ok: responder.status >= 200 && responder.status < 300,
    status: responder.status,
    json: async () => {
      if (responder.jsonThrows) throw new SyntaxError("not json");
      return JSON.parse(JSON.stringify(responder.body));
    },
  } as unknown as Response;
}

const NOT_FOUND: Responder = {
  status: 404,
  body: { code: "UnknownReference", message: "path not recorded", details: {} },
};

const LABEL_ROUTE = new RegExp(
  `^/api/v1/projects/${PROJECT_ID}/concepts/(\\d+)/label$`,
);

/** Build a fixture-backed fetch. `overrides` maps "METHOD path" to a
 * canned response and wins over the recording. */
export function fixtureServer(overrides: Record<string, Responder> = {}): FixtureServer {
  const requests: RequestLogEntry[] = [];
  // user labels set through PATCH during this server's lifetime
  const userLabels = new Map<number, string>();

  const withLabel = (path: string, body: unknown): unknown => {
    const detailMatch = path.match(
      new RegExp(`^/api/v1/projects/${PROJECT_ID}/concepts/(\\d+)$`),
    );
    if (detailMatch) {
      const id = Number(detailMatch[1]);
      const label = userLabels.get(id);
      if (label !== undefined) {
        const detail = body as ConceptDetail;
        detail.label = { ...detail.label, user_label: label, display: label };
      }
      return body;
    }
    if (/\/concepts(\?|$)/.test(path)) {
      const listing = body as ConceptList;
      for (const row of listing.items) {
        const label = userLabels.get(row.concept_id);
        if (label !== undefined) row.label = label;
      }
    }
    return body;
  };

  const fetchImpl: FetchLike = async (input, init) => {
    const method = init?.method ?? "GET";
    const body = typeof init?.body === "string" ? init.body : null;
    requests.push({ method, path: input, body });

    const override = overrides[`${method} ${input}`];
    if (override !== undefined) return fakeResponse(override);

    if (method === "PATCH") {
      const match = input.match(LABEL_ROUTE);
      if (match === null) return fakeResponse(NOT_FOUND);
      const conceptId = Number(match[1]);
      const detail = fixture.responses[
        `/api/v1/projects/${PROJECT_ID}/concepts/${conceptId}`
      ] as ConceptDetail | undefined;
      if (detail === undefined) return fakeResponse(NOT_FOUND);
      const label = (JSON.parse(body ?? "{}") as { label?: string }).label ?? "";
      userLabels.set(conceptId, label);
      return fakeResponse({
        status: 200,
        body: {
          concept_id: conceptId,
          auto_label: detail.label.auto_label,
          user_label: label,
          display: label,
        },
      });
    }

    const recordedBody = fixture.responses[input];
    if (recordedBody === undefined) return fakeResponse(NOT_FOUND);
    return fakeResponse({
      status: 200,
      body: withLabel(input, JSON.parse(JSON.stringify(recordedBody))),
    });
  };

  return { fetch: fetchImpl, requests };
}

/** Flush pending microtasks and timers so in-flight renders settle. */
export async function settle(): Promise<void> {
  for (let i = 0; i < 4; i += 1) {
    await new Promise((resolve) => setTimeout(resolve, 0));
  }
}
