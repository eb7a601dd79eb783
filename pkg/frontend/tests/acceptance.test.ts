/** Acceptance gates for the UI, printed one [PASS]/[FAIL] line each:
 *
 *  1. all three views render from the recorded-fixture API;
 *  2. sort controls round-trip through URL parameters;
 *  3. the saliency strip highlights the fixture's known top word.
 */

import { beforeEach, describe, expect, it } from "vitest";

import type { ConceptList, Explanation, Overview } from "../src/types.js";
import { KNOWN_TOP_WORDS, PROJECT_ID, recordedResponse } from "./fixture.js";
import { mount, selectValue, text } from "./harness.js";

function report(name: string, passed: boolean, detail: string): void {
  console.log(`[${passed ? "PASS" : "FAIL"}] ${name} (${detail})`);
  expect(passed, `${name}: ${detail}`).toBe(true);
}

beforeEach(() => {
  document.body.innerHTML = "";
});

describe("acceptance", () => {
  it("renders all three views from the recorded-fixture API", async () => {
    const overview = recordedResponse<Overview>(`/api/v1/projects/${PROJECT_ID}/overview`);
    const listing = recordedResponse<ConceptList>(
      `/api/v1/projects/${PROJECT_ID}/concepts?sort=size&order=desc`,
    );
    const explanation = recordedResponse<Explanation>(
      `/api/v1/projects/${PROJECT_ID}/sentences/0/explanation`,
    );

    const o = await mount(`?project=${PROJECT_ID}`);
    const countShown = text(o.root, ".concept-count");
    const coverageRows = o.root.querySelectorAll(".coverage-row").length;
    const histogramBars = o.root.querySelectorAll(".histogram .bar").length;

    document.body.innerHTML = "";
    const c = await mount(`?project=${PROJECT_ID}&view=concepts`);
    const cards = c.root.querySelectorAll(".concept-card").length;
    const clouds = c.root.querySelectorAll(".concept-card .cloud-word").length;

    document.body.innerHTML = "";
    const p = await mount(`?project=${PROJECT_ID}&view=predictions&sentence=0`);
    const chips = p.root.querySelectorAll(".saliency-chip").length;
    const probabilityRows = p.root.querySelectorAll(".probability-row").length;

    const ok =
      countShown === String(overview.concept_count) &&
      coverageRows === Object.keys(overview.alignment_coverage).length &&
      histogramBars === overview.size_histogram.counts.length &&
      cards === listing.items.length &&
      clouds > 0 &&
      chips === explanation.word_saliencies.length &&
      probabilityRows === Object.keys(explanation.class_probabilities).length;
    report(
      "all three views render from the recorded fixture",
      ok,
      `overview count ${countShown}, ${cards} concept cards, ${chips} saliency chips`,
    );
  });

  it("sort controls round-trip through URL parameters", async () => {
    const first = await mount(`?project=${PROJECT_ID}&view=concepts`);
    await selectValue(first.root, ".sort-key", "relevance");
    await selectValue(first.root, ".sort-order", "asc");
    const url = window.location.search;
    const params = new URLSearchParams(url);
    const conceptRequests = (s: typeof first.server) =>
      s.requests.filter((r) => r.path.includes("/concepts?")).map((r) => r.path);
    const firstIssued = conceptRequests(first.server).pop()!;
    const firstOrder = [...first.root.querySelectorAll(".concept-card")].map((card) =>
      card.getAttribute("data-concept"),
    );

    // reload the captured URL in a fresh DOM against a fresh fixture server
    document.body.innerHTML = "";
    const second = await mount(url);
    const sortControl = second.root.querySelector<HTMLSelectElement>(".sort-key")!;
    const orderControl = second.root.querySelector<HTMLSelectElement>(".sort-order")!;
    const secondIssued = conceptRequests(second.server).pop()!;
    const secondOrder = [...second.root.querySelectorAll(".concept-card")].map((card) =>
      card.getAttribute("data-concept"),
    );

    const expected = recordedResponse<ConceptList>(
      `/api/v1/projects/${PROJECT_ID}/concepts?sort=relevance&order=asc`,
    );
    const ok =
      params.get("sort") === "relevance" &&
      params.get("order") === "asc" &&
      sortControl.value === "relevance" &&
      orderControl.value === "asc" &&
      firstIssued === secondIssued &&
      firstIssued.endsWith("/concepts?sort=relevance&order=asc") &&
      JSON.stringify(firstOrder) === JSON.stringify(secondOrder) &&
      JSON.stringify(secondOrder) ===
        JSON.stringify(expected.items.map((c) => String(c.concept_id)));
    report(
      "sort controls round-trip through URL parameters",
      ok,
      `URL ${url} reissued ${secondIssued.split("?")[1]} and restored the control state`,
    );
  });

  it("the saliency strip highlights the fixture's known top word", async () => {
    let checked = 0;
    let failures = "";
    for (const known of KNOWN_TOP_WORDS) {
      document.body.innerHTML = "";
      const { root } = await mount(
        `?project=${PROJECT_ID}&view=predictions&sentence=${known.sentence_id}`,
      );
      const top = root.querySelector<HTMLElement>(".saliency-chip.top-word");
      const intensity = top === null ? 0 : Math.abs(Number(top.getAttribute("data-score")));
      const everyOther = [...root.querySelectorAll(".saliency-chip")].every(
        (chip) => Math.abs(Number(chip.getAttribute("data-score"))) <= intensity + 1e-9,
      );
      if (
        top === null ||
        top.textContent !== known.top_surface ||
        Number(top.getAttribute("data-position")) !== known.top_word ||
        Math.abs(intensity - 1.0) > 1e-6 ||
        !everyOther
      ) {
        failures += ` sentence ${known.sentence_id}:${top?.textContent ?? "missing"} vs ${known.top_surface};`;
      }
      checked += 1;
    }
    report(
      "saliency strip highlights the known top word",
      failures === "" && checked === KNOWN_TOP_WORDS.length,
      failures === ""
        ? `${checked} sentences, top chip carries |score|=1 and the known surface`
        : failures.trim(),
    );
  });

});
