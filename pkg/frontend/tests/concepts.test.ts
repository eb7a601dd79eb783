import { beforeEach, describe, expect, it } from "vitest";

import { cloudEntries } from "../src/cloud.js";
import type { ConceptDetail, ConceptList } from "../src/types.js";
import { PROJECT_ID, recordedResponse, settle } from "./fixture.js";
import { click, mount, selectValue, text } from "./harness.js";

const LIST_PATH = `/api/v1/projects/${PROJECT_ID}/concepts?sort=size&order=desc`;

function detailPath(conceptId: number): string {
  return `/api/v1/projects/${PROJECT_ID}/concepts/${conceptId}`;
}

beforeEach(() => {
  document.body.innerHTML = "";
});

describe("concept browser", () => {
  it("renders the cards in the exact order the API returned", async () => {
    const { root } = await mount(`?project=${PROJECT_ID}&view=concepts`);
    const listing = recordedResponse<ConceptList>(LIST_PATH);
    const cards = [...root.querySelectorAll(".concept-card")];
    expect(cards.map((c) => Number(c.getAttribute("data-concept")))).toEqual(
      listing.items.map((c) => c.concept_id),
    );
    expect(cards[0].querySelector(".card-label")!.textContent).toBe(listing.items[0].label);
    expect(text(cards[0], ".card-size")).toBe(`${listing.items[0].size} occurrences`);
  });

  it("fills each card's word cloud from the concept detail response", async () => {
    const { root } = await mount(`?project=${PROJECT_ID}&view=concepts`);
    const listing = recordedResponse<ConceptList>(LIST_PATH);
    const first = root.querySelector(".concept-card")!;
    const detail = recordedResponse<ConceptDetail>(detailPath(listing.items[0].concept_id));
    const expected = cloudEntries(detail.members);
    const words = [...first.querySelectorAll(".cloud-word")];
    expect(words.map((w) => w.textContent)).toEqual(expected.map((e) => e.type));
    expect(words.map((w) => Number(w.getAttribute("data-count")))).toEqual(
      expected.map((e) => e.count),
    );
  });

  it("word clouds scale deterministically with type frequency", async () => {
    const { root } = await mount(`?project=${PROJECT_ID}&view=concepts`);
    const first = root.querySelector(".concept-card")!;
    const sizes = [...first.querySelectorAll<HTMLElement>(".cloud-word")].map((w) =>
      parseFloat(w.style.fontSize),
    );
    const counts = [...first.querySelectorAll(".cloud-word")].map((w) =>
      Number(w.getAttribute("data-count")),
    );
    for (let i = 1; i < sizes.length; i += 1) {
      // list is ordered most→least frequent, so em sizes never increase
      expect(sizes[i]).toBeLessThanOrEqual(sizes[i - 1] + 1e-9);
      expect(counts[i]).toBeLessThanOrEqual(counts[i - 1]);
    }
  });

  it("changing the sort control reissues the listing with matching parameters", async () => {
    const { root, server } = await mount(`?project=${PROJECT_ID}&view=concepts`);
    await selectValue(root, ".sort-key", "relevance");
    const issued = server.requests.filter((r) => r.path.includes("/concepts?"));
    expect(issued[issued.length - 1].path).toBe(
      `/api/v1/projects/${PROJECT_ID}/concepts?sort=relevance&order=desc`,
    );
    const expected = recordedResponse<ConceptList>(
      `/api/v1/projects/${PROJECT_ID}/concepts?sort=relevance&order=desc`,
    );
    const cards = [...root.querySelectorAll(".concept-card")];
    expect(cards.map((c) => Number(c.getAttribute("data-concept")))).toEqual(
      expected.items.map((c) => c.concept_id),
    );
  });

  it("filtering by tagset reissues the listing with the tagset parameter", async () => {
    const { root, server } = await mount(`?project=${PROJECT_ID}&view=concepts`);
    await selectValue(root, ".tagset-filter", "pos");
    const issued = server.requests.filter((r) => r.path.includes("tagset="));
    expect(issued[issued.length - 1].path).toBe(
      `/api/v1/projects/${PROJECT_ID}/concepts?sort=size&order=desc&tagset=pos`,
    );
    expect(new URLSearchParams(window.location.search).get("tagset")).toBe("pos");
  });

  it("clicking a card opens its detail with context snippets", async () => {
    const { root } = await mount(`?project=${PROJECT_ID}&view=concepts`);
    const listing = recordedResponse<ConceptList>(LIST_PATH);
    click(root, ".concept-card");
    await settle();
    const detail = recordedResponse<ConceptDetail>(detailPath(listing.items[0].concept_id));
    expect(root.querySelector(".concept-detail")).not.toBeNull();
    expect(text(root, ".concept-heading")).toBe(detail.label.display);
    const snippets = [...root.querySelectorAll(".snippet")];
    expect(snippets.length).toBe(Math.min(30, detail.members.length));
    expect(snippets[0].querySelector(".snippet-word")!.textContent).toBe(
      detail.members[0].context.word,
    );
  });

  it("a deep-linked page number reloads the same listing page", async () => {
    const { root, server } = await mount(
      `?project=${PROJECT_ID}&view=concepts&page=3&per_page=2`,
    );
    const path = `/api/v1/projects/${PROJECT_ID}/concepts?sort=size&order=desc&page=3&per_page=2`;
    expect(server.requests.some((r) => r.path === path)).toBe(true);
    const expected = recordedResponse<ConceptList>(path);
    const cards = [...root.querySelectorAll(".concept-card")];
    expect(cards.map((c) => Number(c.getAttribute("data-concept")))).toEqual(
      expected.items.map((c) => c.concept_id),
    );
    expect(text(root, ".page-indicator")).toBe("page 3 of 4");
  });

  it("a deep link to a concept restores the same detail view", async () => {
    const { root } = await mount(`?project=${PROJECT_ID}&view=concepts&concept=2`);
    const detail = recordedResponse<ConceptDetail>(detailPath(2));
    expect(text(root, ".concept-heading")).toBe(detail.label.display);
    expect(root.querySelector(".concept-detail")!.getAttribute("data-concept")).toBe("2");
  });
});

describe("concept renaming", () => {
  it("blocks empty labels client-side without calling the API", async () => {
    const { root, server } = await mount(`?project=${PROJECT_ID}&view=concepts&concept=0`);
    const input = root.querySelector<HTMLInputElement>(".rename-input")!;
    input.value = "   ";
    click(root, ".rename-button");
    await settle();
    expect(text(root, ".form-error")).toBe("Label must not be empty.");
    expect(server.requests.filter((r) => r.method === "PATCH")).toEqual([]);
  });

  it("renames through the API and persists across a reload", async () => {
    const first = await mount(`?project=${PROJECT_ID}&view=concepts&concept=0`);
    const input = first.root.querySelector<HTMLInputElement>(".rename-input")!;
    input.value = "my pet concept";
    click(first.root, ".rename-button");
    await settle();
    expect(text(first.root, ".concept-heading")).toBe("my pet concept");
    const patch = first.server.requests.find((r) => r.method === "PATCH");
    expect(patch).toBeDefined();
    expect(JSON.parse(patch!.body!)).toEqual({ label: "my pet concept" });

    // reload: fresh DOM + app against the same (stateful) fixture server
    document.body.innerHTML = "";
    const root = document.createElement("div");
    document.body.append(root);
    const { App } = await import("../src/app.js");
    const { ApiClient } = await import("../src/api.js");
    window.history.replaceState(null, "", `?project=${PROJECT_ID}&view=concepts&concept=0`);
    const app = new App({ client: new ApiClient("/api/v1", first.server.fetch), root, window });
    app.start();
    await settle();
    expect(text(root, ".concept-heading")).toBe("my pet concept");
  });

  it("surfaces a state conflict from the API", async () => {
    const { root } = await mount(`?project=${PROJECT_ID}&view=concepts&concept=0`, {
      [`PATCH /api/v1/projects/${PROJECT_ID}/concepts/0/label`]: {
        status: 409,
        body: {
          code: "StateConflict",
          message: "operation not permitted in current state",
          details: { current: "CLUSTERING" },
        },
      },
    });
    const input = root.querySelector<HTMLInputElement>(".rename-input")!;
    input.value = "too late";
    click(root, ".rename-button");
    await settle();
    expect(text(root, ".form-error")).toContain("StateConflict");
    expect(text(root, ".form-error")).toContain("operation not permitted");
  });
});
