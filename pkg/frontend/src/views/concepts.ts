/** Concept browser: a sortable, paginated card grid, and a detail panel
 * with context snippets and renaming. Sorting and paging are pure
 * passthroughs — the cards render in exactly the order the API returns. */

import { ApiError } from "../api.js";
import { cloudEntries } from "../cloud.js";
import { el, formatNumber, formatPercent, swap } from "../dom.js";
import { SORT_KEYS, SortKey, SortOrder } from "../state.js";
import { ConceptDetail, ConceptMember, ConceptRow } from "../types.js";
import { ViewContext } from "./overview.js";

function alignmentBadge(row: ConceptRow): HTMLElement {
  if (row.alignment === null) {
    return el("span", { class: "badge unaligned" }, "unaligned");
  }
  const a = row.alignment;
  return el(
    "span",
    { class: "badge aligned", "data-tagset": a.tagset, "data-tag": a.tag },
    `${a.tagset}:${a.tag} ${formatPercent(a.score)}`,
  );
}

function wordCloud(members: Pick<ConceptMember, "surface">[]): HTMLElement {
  const cloud = el("div", { class: "word-cloud" });
  for (const entry of cloudEntries(members)) {
    const chip = el(
      "span",
      { class: "cloud-word", "data-count": String(entry.count) },
      entry.type,
    );
    chip.style.fontSize = `${entry.em.toFixed(3)}em`;
    cloud.append(chip);
  }
  return cloud;
}

function conceptCard(row: ConceptRow, ctx: ViewContext): HTMLElement {
  const cloudSlot = el("div", { class: "cloud-slot" }, "…");
  const card = el(
    "article",
    { class: "concept-card", "data-concept": String(row.concept_id) },
    el("h3", { class: "card-label" }, row.label),
    cloudSlot,
    el(
      "div",
      { class: "card-stats" },
      el("span", { class: "card-size" }, `${row.size} occurrences`),
      alignmentBadge(row),
      el(
        "span",
        { class: "card-purity" },
        row.purity === null ? "purity —" : `purity ${formatPercent(row.purity)}`,
      ),
      el("span", { class: "card-relevance" }, `relevance ${formatNumber(row.relevance)}`),
    ),
  );
  // The cloud needs member surfaces, which only the detail endpoint
  // carries; fill it in when the response lands. A stale card is by
  // then detached, so late writes are invisible.
  ctx.client
    .concept(ctx.state.project!, row.concept_id)
    .then((detail) => swap(cloudSlot, wordCloud(detail.members)))
    .catch(() => swap(cloudSlot, el("span", { class: "cloud-error" }, "cloud unavailable")));
  card.addEventListener("click", () => {
    ctx.navigate({ ...ctx.state, view: "concepts", concept: row.concept_id });
  });
  return card;
}

function sortControls(ctx: ViewContext, tagsets: string[]): HTMLElement {
  const q = ctx.state.concepts;
  const sortSelect = el("select", { class: "sort-key", "aria-label": "sort key" });
  for (const key of SORT_KEYS) {
    const option = el("option", { value: key }, key);
    if (key === q.sort) option.selected = true;
    sortSelect.append(option);
  }
  const orderSelect = el("select", { class: "sort-order", "aria-label": "sort order" });
  for (const order of ["desc", "asc"] as const) {
    const option = el("option", { value: order }, order === "desc" ? "descending" : "ascending");
    if (order === q.order) option.selected = true;
    orderSelect.append(option);
  }
  const tagsetSelect = el("select", { class: "tagset-filter", "aria-label": "tagset filter" });
  tagsetSelect.append(el("option", { value: "" }, "all tagsets"));
  for (const name of tagsets) {
    const option = el("option", { value: name }, name);
    if (name === q.tagset) option.selected = true;
    tagsetSelect.append(option);
  }
  sortSelect.addEventListener("change", () => {
    ctx.navigate({
      ...ctx.state,
      concepts: { ...q, sort: sortSelect.value as SortKey, page: 1 },
    });
  });
  orderSelect.addEventListener("change", () => {
    ctx.navigate({
      ...ctx.state,
      concepts: { ...q, order: orderSelect.value as SortOrder, page: 1 },
    });
  });
  tagsetSelect.addEventListener("change", () => {
    ctx.navigate({
      ...ctx.state,
      concepts: { ...q, tagset: tagsetSelect.value === "" ? null : tagsetSelect.value, page: 1 },
    });
  });
  return el("div", { class: "toolbar" }, sortSelect, orderSelect, tagsetSelect);
}

function pager(ctx: ViewContext, total: number): HTMLElement {
  const q = ctx.state.concepts;
  const pages = Math.max(1, Math.ceil(total / q.perPage));
  const prev = el("button", { class: "page-prev", type: "button" }, "‹ prev");
  const next = el("button", { class: "page-next", type: "button" }, "next ›");
  prev.disabled = q.page <= 1;
  next.disabled = q.page >= pages;
  prev.addEventListener("click", () => {
    ctx.navigate({ ...ctx.state, concepts: { ...q, page: q.page - 1 } });
  });
  next.addEventListener("click", () => {
    ctx.navigate({ ...ctx.state, concepts: { ...q, page: q.page + 1 } });
  });
  return el(
    "div",
    { class: "pager" },
    prev,
    el("span", { class: "page-indicator" }, `page ${q.page} of ${pages}`),
    next,
  );
}

async function renderConceptList(ctx: ViewContext): Promise<HTMLElement> {
  const projectId = ctx.state.project!;
  const [listing, overview] = await Promise.all([
    ctx.client.concepts(projectId, ctx.state.concepts),
    ctx.client.overview(projectId),
  ]);
  const root = el("div", { class: "view concepts-view" });
  root.append(sortControls(ctx, Object.keys(overview.alignment_coverage).sort()));
  const grid = el("div", { class: "concept-grid" });
  for (const row of listing.items) {
    grid.append(conceptCard(row, ctx));
  }
  root.append(grid, pager(ctx, listing.total));
  return root;
}

function renameForm(detail: ConceptDetail, ctx: ViewContext, heading: HTMLElement): HTMLElement {
  const input = el("input", {
    class: "rename-input",
    type: "text",
    placeholder: "new label",
    value: detail.label.user_label ?? "",
  });
  const button = el("button", { class: "rename-button", type: "button" }, "Rename");
  const message = el("span", { class: "form-message" });
  button.addEventListener("click", async () => {
    const value = input.value.trim();
    if (value === "") {
      message.className = "form-message form-error";
      message.textContent = "Label must not be empty.";
      return;
    }
    try {
      const updated = await ctx.client.setLabel(ctx.state.project!, detail.concept_id, value);
      heading.textContent = updated.display;
      message.className = "form-message form-ok";
      message.textContent = "Saved.";
    } catch (error) {
      message.className = "form-message form-error";
      message.textContent =
        error instanceof ApiError ? `${error.code}: ${error.message}` : String(error);
    }
  });
  return el("div", { class: "rename-form" }, input, button, message);
}

function snippetList(members: ConceptMember[]): HTMLElement {
  const list = el("ul", { class: "snippets" });
  for (const member of members.slice(0, 30)) {
    list.append(
      el(
        "li",
        { class: "snippet", "data-sentence": String(member.sentence_id) },
        member.context.before,
        " ",
        el("mark", { class: "snippet-word" }, member.context.word),
        " ",
        member.context.after,
      ),
    );
  }
  return list;
}

async function renderConceptDetail(ctx: ViewContext, conceptId: number): Promise<HTMLElement> {
  const detail = await ctx.client.concept(ctx.state.project!, conceptId);
  const heading = el("h2", { class: "concept-heading" }, detail.label.display);
  const back = el("button", { class: "back-link", type: "button" }, "‹ all concepts");
  back.addEventListener("click", () => {
    ctx.navigate({ ...ctx.state, concept: null });
  });
  const stats = el(
    "div",
    { class: "detail-stats" },
    el("span", { class: "card-size" }, `${detail.size} occurrences`),
    el("span", { class: "card-relevance" }, `relevance ${formatNumber(detail.relevance)}`),
  );
  if (detail.affinity !== null) {
    stats.append(
      el(
        "span",
        { class: "card-purity" },
        `purity ${formatPercent(detail.affinity.purity)} (${detail.affinity.dominant_class ?? "—"})`,
      ),
    );
  }
  const alignments = el("div", { class: "detail-alignments" });
  if (detail.alignments.length === 0) {
    alignments.append(el("span", { class: "badge unaligned" }, "unaligned"));
  }
  for (const a of detail.alignments) {
    alignments.append(
      el(
        "span",
        { class: "badge aligned", "data-tagset": a.tagset, "data-tag": a.tag },
        `${a.tagset}:${a.tag} ${formatPercent(a.score)}`,
      ),
    );
  }
  return el(
    "div",
    { class: "view concept-detail", "data-concept": String(conceptId) },
    back,
    heading,
    renameForm(detail, ctx, heading),
    stats,
    alignments,
    el("h3", {}, "Member words"),
    wordCloud(detail.members),
    el("h3", {}, "In context"),
    snippetList(detail.members),
  );
}

export async function renderConcepts(ctx: ViewContext): Promise<HTMLElement> {
  if (ctx.state.concept !== null) {
    return renderConceptDetail(ctx, ctx.state.concept);
  }
  return renderConceptList(ctx);
}
