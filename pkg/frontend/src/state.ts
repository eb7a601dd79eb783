/** View state and its bidirectional mapping to URL query parameters.
 *
 * The whole UI state lives in the page's query string, so any view is
 * deep-linkable: parsing a URL and serializing the result yields the
 * same URL, and equal URLs render equal views given equal API data.
 * Parameters at their default value are omitted to keep links short.
 */

export type ViewName = "overview" | "concepts" | "predictions";

export const SORT_KEYS = ["size", "alignment", "class", "relevance"] as const;
export type SortKey = (typeof SORT_KEYS)[number];
export type SortOrder = "asc" | "desc";

export interface ConceptQuery {
  sort: SortKey;
  order: SortOrder;
  page: number;
  perPage: number;
  tagset: string | null;
}

export interface ViewState {
  project: string | null;
  view: ViewName;
  concepts: ConceptQuery;
  /** Selected concept; non-null switches the concepts view to detail. */
  concept: number | null;
  /** Selected sentence in the predictions view. */
  sentence: number | null;
}

export const DEFAULT_QUERY: ConceptQuery = {
  sort: "size",
  order: "desc",
  page: 1,
  perPage: 50,
  tagset: null,
};

export function defaultState(): ViewState {
  return {
    project: null,
    view: "overview",
    concepts: { ...DEFAULT_QUERY },
    concept: null,
    sentence: null,
  };
}

function isViewName(v: string): v is ViewName {
  return v === "overview" || v === "concepts" || v === "predictions";
}

function isSortKey(v: string): v is SortKey {
  return (SORT_KEYS as readonly string[]).includes(v);
}

function positiveInt(v: string | null): number | null {
  if (v === null) return null;
  const n = Number(v);
  return Number.isInteger(n) && n >= 1 ? n : null;
}

function nonNegativeInt(v: string | null): number | null {
  if (v === null) return null;
  const n = Number(v);
  return Number.isInteger(n) && n >= 0 ? n : null;
}

/** Parse a query string (with or without leading "?") into a ViewState.
 * Unknown parameters and invalid values fall back to defaults. */
export function parseViewState(search: string): ViewState {
  const params = new URLSearchParams(search.startsWith("?") ? search.slice(1) : search);
  const state = defaultState();
  state.project = params.get("project");
  const view = params.get("view");
  if (view !== null && isViewName(view)) state.view = view;
  const sort = params.get("sort");
  if (sort !== null && isSortKey(sort)) state.concepts.sort = sort;
  const order = params.get("order");
  if (order === "asc" || order === "desc") state.concepts.order = order;
  state.concepts.page = positiveInt(params.get("page")) ?? DEFAULT_QUERY.page;
  state.concepts.perPage = positiveInt(params.get("per_page")) ?? DEFAULT_QUERY.perPage;
  state.concepts.tagset = params.get("tagset");
  state.concept = nonNegativeInt(params.get("concept"));
  state.sentence = nonNegativeInt(params.get("sentence"));
  return state;
}

/** Serialize a ViewState to a query string ("?a=b" or "" when all defaults).
 * Parameters are emitted in a fixed order so equal states give equal URLs. */
export function serializeViewState(state: ViewState): string {
  const params = new URLSearchParams();
  if (state.project !== null) params.set("project", state.project);
  if (state.view !== "overview") params.set("view", state.view);
  const q = state.concepts;
  if (q.sort !== DEFAULT_QUERY.sort) params.set("sort", q.sort);
  if (q.order !== DEFAULT_QUERY.order) params.set("order", q.order);
  if (q.page !== DEFAULT_QUERY.page) params.set("page", String(q.page));
  if (q.perPage !== DEFAULT_QUERY.perPage) params.set("per_page", String(q.perPage));
  if (q.tagset !== null) params.set("tagset", q.tagset);
  if (state.concept !== null) params.set("concept", String(state.concept));
  if (state.sentence !== null) params.set("sentence", String(state.sentence));
  const out = params.toString();
  return out === "" ? "" : `?${out}`;
}

/** API request path for a concept listing. Sort key and order are always
 * explicit so the issued request states the controls verbatim; paging and
 * filter parameters appear only when they differ from the defaults. */
export function conceptListPath(projectId: string, q: ConceptQuery): string {
  const params = new URLSearchParams();
  params.set("sort", q.sort);
  params.set("order", q.order);
  if (q.page !== DEFAULT_QUERY.page) params.set("page", String(q.page));
  if (q.perPage !== DEFAULT_QUERY.perPage) params.set("per_page", String(q.perPage));
  if (q.tagset !== null) params.set("tagset", q.tagset);
  return `/projects/${projectId}/concepts?${params.toString()}`;
}
