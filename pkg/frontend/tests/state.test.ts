import { describe, expect, it } from "vitest";

import {
  conceptListPath,
  DEFAULT_QUERY,
  defaultState,
  parseViewState,
  serializeViewState,
  SORT_KEYS,
  ViewState,
} from "../src/state.js";

describe("view state <-> URL round-trip", () => {
  it("all-defaults state serializes to an empty query", () => {
    expect(serializeViewState(defaultState())).toBe("");
    expect(parseViewState("")).toEqual(defaultState());
  });

  it("parse(serialize(state)) is the identity over the state grid", () => {
    for (const view of ["overview", "concepts", "predictions"] as const) {
      for (const sort of SORT_KEYS) {
        for (const order of ["asc", "desc"] as const) {
          for (const page of [1, 3]) {
            for (const tagset of [null, "pos"]) {
              for (const concept of [null, 2]) {
                for (const sentence of [null, 0, 7]) {
                  const state: ViewState = {
                    project: "abc123",
                    view,
                    concepts: { sort, order, page, perPage: 50, tagset },
                    concept,
                    sentence,
                  };
                  expect(parseViewState(serializeViewState(state))).toEqual(state);
                }
              }
            }
          }
        }
      }
    }
  });

  it("per_page round-trips when non-default", () => {
    const state = defaultState();
    state.project = "p";
    state.concepts.perPage = 10;
    const url = serializeViewState(state);
    expect(url).toContain("per_page=10");
    expect(parseViewState(url)).toEqual(state);
  });

  it("default values are omitted from the URL", () => {
    const state = defaultState();
    state.project = "p";
    state.view = "concepts";
    expect(serializeViewState(state)).toBe("?project=p&view=concepts");
  });

  it("invalid or unknown parameters fall back to defaults", () => {
    const parsed = parseViewState("?view=nope&sort=wat&order=up&page=-3&per_page=0&bogus=1");
    expect(parsed).toEqual(defaultState());
  });

  it("equal URLs parse to equal states regardless of parameter order", () => {
    const a = parseViewState("?project=p&view=concepts&sort=class&order=asc");
    const b = parseViewState("?order=asc&sort=class&view=concepts&project=p");
    expect(a).toEqual(b);
    expect(serializeViewState(a)).toBe(serializeViewState(b));
  });
});

describe("concept listing request path", () => {
  it("always states sort and order explicitly", () => {
    expect(conceptListPath("p", { ...DEFAULT_QUERY })).toBe(
      "/projects/p/concepts?sort=size&order=desc",
    );
  });

  it("adds paging and filter parameters only when non-default", () => {
    expect(
      conceptListPath("p", { sort: "alignment", order: "asc", page: 2, perPage: 25, tagset: "pos" }),
    ).toBe("/projects/p/concepts?sort=alignment&order=asc&page=2&per_page=25&tagset=pos");
  });

  it("same query always yields the same path", () => {
    const q = { sort: "relevance", order: "desc", page: 1, perPage: 50, tagset: null } as const;
    expect(conceptListPath("p", { ...q })).toBe(conceptListPath("p", { ...q }));
  });
});
