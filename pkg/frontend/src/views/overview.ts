/** Project overview: concept count, tagset alignment coverage, the
 * concept-size distribution, and the most prediction-relevant concepts.
 * Every figure shown is a field of the status or overview response. */

import { ApiClient } from "../api.js";
import { el, formatNumber, formatPercent } from "../dom.js";
import { ViewState } from "../state.js";
import { Overview, ProjectStatus } from "../types.js";

export interface ViewContext {
  client: ApiClient;
  state: ViewState;
  navigate: (next: ViewState) => void;
}

export function errorBanner(title: string, reason: string): HTMLElement {
  return el(
    "div",
    { class: "error-banner", role: "alert" },
    el("strong", {}, title),
    " ",
    el("span", { class: "error-reason" }, reason),
  );
}

function statusNote(status: ProjectStatus): HTMLElement {
  return el(
    "div",
    { class: "status-note" },
    `Project is ${status.state} (progress ${formatPercent(status.progress)}); ` +
      "results appear once it is READY.",
  );
}

function coverageSection(coverage: Record<string, number>): HTMLElement {
  const section = el("section", { class: "coverage" }, el("h2", {}, "Alignment coverage"));
  const names = Object.keys(coverage).sort();
  if (names.length === 0) {
    section.append(
      el("div", { class: "empty-state" }, "No tagsets uploaded for this project."),
    );
    return section;
  }
  for (const name of names) {
    const fraction = coverage[name];
    const fill = el("div", { class: "meter-fill" });
    fill.style.width = `${Math.round(fraction * 100)}%`;
    section.append(
      el(
        "div",
        { class: "coverage-row", "data-tagset": name },
        el("span", { class: "tagset-name" }, name),
        el("div", { class: "meter" }, fill),
        el("span", { class: "coverage-value" }, formatPercent(fraction)),
      ),
    );
  }
  return section;
}

function bucketLabel(lo: number | null, hi: number | null): string {
  if (hi === null) return `${lo}+`;
  return hi - 1 === lo ? String(lo) : `${lo}–${hi - 1}`;
}

function histogramSection(overview: Overview): HTMLElement {
  const { edges, counts } = overview.size_histogram;
  const peak = Math.max(1, ...counts);
  const chart = el("div", { class: "histogram", role: "img", "aria-label": "concept size distribution" });
  counts.forEach((count, i) => {
    const bar = el("div", { class: "bar-fill" });
    bar.style.height = `${Math.round((count / peak) * 100)}%`;
    chart.append(
      el(
        "div",
        { class: "bar", "data-count": String(count) },
        el("span", { class: "bar-count" }, String(count)),
        bar,
        el("span", { class: "bar-label" }, bucketLabel(edges[i], edges[i + 1])),
      ),
    );
  });
  return el("section", { class: "size-distribution" }, el("h2", {}, "Concept sizes"), chart);
}

function topSalientSection(overview: Overview, ctx: ViewContext): HTMLElement {
  const section = el("section", { class: "top-salient" }, el("h2", {}, "Most relevant concepts"));
  const list = el("ol", { class: "salient-list" });
  for (const row of overview.top_salient_concepts) {
    const item = el(
      "li",
      { class: "salient-row", "data-concept": String(row.concept_id) },
      el("button", { class: "concept-link", type: "button" }, row.label),
      el("span", { class: "salient-size" }, `${row.size} occurrences`),
      el("span", { class: "salient-relevance" }, formatNumber(row.relevance)),
    );
    item.querySelector("button")!.addEventListener("click", () => {
      ctx.navigate({ ...ctx.state, view: "concepts", concept: row.concept_id });
    });
    list.append(item);
  }
  section.append(list);
  return section;
}

function classDistributionSection(overview: Overview): HTMLElement {
  const section = el("section", { class: "class-distribution" }, el("h2", {}, "Predicted classes"));
  for (const name of Object.keys(overview.class_distribution).sort()) {
    section.append(
      el(
        "span",
        { class: "class-chip", "data-class": name },
        `${name} ${formatPercent(overview.class_distribution[name])}`,
      ),
    );
  }
  return section;
}

export async function renderOverview(ctx: ViewContext): Promise<HTMLElement> {
  const projectId = ctx.state.project!;
  const status = await ctx.client.status(projectId);
  const root = el("div", { class: "view overview-view" });
  if (status.state === "FAILED") {
    root.append(
      errorBanner("Pipeline failed.", status.failure_reason ?? "no reason recorded"),
    );
    return root;
  }
  if (status.state !== "READY") {
    root.append(statusNote(status));
    return root;
  }
  const overview = await ctx.client.overview(projectId);
  root.append(
    el(
      "section",
      { class: "headline" },
      el("span", { class: "stat concept-count", "data-value": String(overview.concept_count) },
        String(overview.concept_count)),
      el("span", { class: "stat-label" }, "concepts discovered"),
    ),
    coverageSection(overview.alignment_coverage),
    histogramSection(overview),
    topSalientSection(overview, ctx),
    classDistributionSection(overview),
  );
  return root;
}
