/** Thin typed client for the /api/v1 REST service.
 *
 * Every method maps to exactly one endpoint and returns the parsed
 * response body unchanged; no fields are computed client-side. Non-2xx
 * responses raise ApiError carrying the service's error envelope.
 */

import { conceptListPath, ConceptQuery } from "./state.js";
import {
  ConceptDetail,
  ConceptList,
  ErrorEnvelope,
  Explanation,
  LabelUpdate,
  Overview,
  ProjectList,
  ProjectStatus,
  SentenceList,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  readonly status: number;
  readonly code: string;
  readonly details: Record<string, unknown>;

  constructor(status: number, envelope: ErrorEnvelope) {
    super(envelope.message);
    this.name = "ApiError";
    this.status = status;
    this.code = envelope.code;
    this.details = envelope.details ?? {};
  }
}

export class ApiClient {
  private readonly base: string;
  private readonly fetchImpl: FetchLike;

  constructor(base = "/api/v1", fetchImpl?: FetchLike) {
    this.base = base.replace(/\/$/, "");
    this.fetchImpl = fetchImpl ?? ((input, init) => fetch(input, init));
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(this.base + path, init);
    if (!response.ok) {
      let envelope: ErrorEnvelope;
      try {
        envelope = (await response.json()) as ErrorEnvelope;
      } catch {
        envelope = { code: "HttpError", message: `HTTP ${response.status}`, details: {} };
      }
      throw new ApiError(response.status, envelope);
    }
    return (await response.json()) as T;
  }

  listProjects(): Promise<ProjectList> {
    return this.request("/projects");
  }

  status(projectId: string): Promise<ProjectStatus> {
    return this.request(`/projects/${projectId}/status`);
  }

  overview(projectId: string): Promise<Overview> {
    return this.request(`/projects/${projectId}/overview`);
  }

  concepts(projectId: string, query: ConceptQuery): Promise<ConceptList> {
    return this.request(conceptListPath(projectId, query));
  }

  concept(projectId: string, conceptId: number): Promise<ConceptDetail> {
    return this.request(`/projects/${projectId}/concepts/${conceptId}`);
  }

  sentences(projectId: string, page = 1, perPage = 50): Promise<SentenceList> {
    return this.request(`/projects/${projectId}/sentences?page=${page}&per_page=${perPage}`);
  }

  explanation(projectId: string, sentenceId: number): Promise<Explanation> {
    return this.request(`/projects/${projectId}/sentences/${sentenceId}/explanation`);
  }

  setLabel(projectId: string, conceptId: number, label: string): Promise<LabelUpdate> {
    return this.request(`/projects/${projectId}/concepts/${conceptId}/label`, {
      method: "PATCH",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ label }),
    });
  }
}
