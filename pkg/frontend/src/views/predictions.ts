/** Prediction explanations: pick a sentence, see the signed saliency
 * heat strip, the predicted class with its probabilities, and the
 * latent concepts matched through the salient words. */

import { saliencyColor, saliencyTextColor } from "../color.js";
import { el, formatNumber, swap } from "../dom.js";
import { Explanation, SentenceList } from "../types.js";
import { ViewContext } from "./overview.js";

function sentencePicker(listing: SentenceList, ctx: ViewContext): HTMLElement {
  const panel = el("div", { class: "sentence-picker" }, el("h2", {}, "Sentences"));
  const list = el("ul", { class: "sentence-list" });
  const renderItems = (rows: SentenceList) => {
    const items = rows.items.map((row) => {
      const item = el(
        "li",
        { class: "sentence-row", "data-sentence": String(row.sentence_id) },
        el("span", { class: "sentence-id" }, `#${row.sentence_id}`),
        el("span", { class: "sentence-text" }, row.text),
        el("span", { class: "sentence-class" }, row.predicted_class ?? "—"),
      );
      if (row.sentence_id === ctx.state.sentence) item.classList.add("selected");
      item.addEventListener("click", () => {
        ctx.navigate({ ...ctx.state, sentence: row.sentence_id });
      });
      return item;
    });
    swap(list, ...items);
  };
  renderItems(listing);
  const pages = Math.max(1, Math.ceil(listing.total / listing.per_page));
  let page = listing.page;
  const indicator = el("span", { class: "page-indicator" }, `page ${page} of ${pages}`);
  const prev = el("button", { class: "page-prev", type: "button" }, "‹ prev");
  const next = el("button", { class: "page-next", type: "button" }, "next ›");
  const sync = () => {
    prev.disabled = page <= 1;
    next.disabled = page >= pages;
    indicator.textContent = `page ${page} of ${pages}`;
  };
  const flip = async (delta: number) => {
    page += delta;
    sync();
    renderItems(await ctx.client.sentences(ctx.state.project!, page, listing.per_page));
  };
  prev.addEventListener("click", () => void flip(-1));
  next.addEventListener("click", () => void flip(1));
  sync();
  panel.append(list, el("div", { class: "pager" }, prev, indicator, next));
  return panel;
}

function heatStrip(explanation: Explanation): HTMLElement {
  const triggers = new Set(
    explanation.matched_concepts.flatMap((m) => m.trigger_positions),
  );
  const strip = el("div", { class: "heat-strip" });
  for (const ws of explanation.word_saliencies) {
    const chip = el(
      "span",
      {
        class: "saliency-chip",
        "data-position": String(ws.position),
        "data-score": ws.score.toFixed(6),
        title: `${ws.surface}: ${formatNumber(ws.score)}`,
      },
      ws.surface,
    );
    chip.style.backgroundColor = saliencyColor(ws.score);
    chip.style.color = saliencyTextColor(ws.score);
    if (ws.position === explanation.top_word) chip.classList.add("top-word");
    if (triggers.has(ws.position)) chip.classList.add("trigger");
    strip.append(chip);
  }
  return strip;
}

function probabilitySection(explanation: Explanation): HTMLElement {
  const section = el(
    "section",
    { class: "prediction" },
    el(
      "div",
      { class: "predicted-class" },
      "Predicted: ",
      el("strong", { "data-class": explanation.predicted_class }, explanation.predicted_class),
    ),
  );
  for (const name of Object.keys(explanation.class_probabilities).sort()) {
    const prob = explanation.class_probabilities[name];
    const fill = el("div", { class: "meter-fill" });
    fill.style.width = `${Math.round(prob * 100)}%`;
    section.append(
      el(
        "div",
        { class: "probability-row", "data-class": name },
        el("span", { class: "class-name" }, name),
        el("div", { class: "meter" }, fill),
        el("span", { class: "probability-value" }, formatNumber(prob)),
      ),
    );
  }
  return section;
}

function matchedSection(explanation: Explanation, ctx: ViewContext): HTMLElement {
  const section = el("section", { class: "matched" }, el("h2", {}, "Matched concepts"));
  if (explanation.matched_concepts.length === 0) {
    section.append(
      el("div", { class: "empty-state" }, "No concept passed the saliency floor."),
    );
    return section;
  }
  const list = el("ul", { class: "matched-list" });
  for (const match of explanation.matched_concepts) {
    const link = el("button", { class: "concept-link", type: "button" }, match.label);
    link.addEventListener("click", () => {
      ctx.navigate({ ...ctx.state, view: "concepts", concept: match.concept_id });
    });
    const triggers = el("span", { class: "trigger-words" });
    for (const position of match.trigger_positions) {
      triggers.append(
        el(
          "mark",
          { class: "trigger", "data-position": String(position) },
          explanation.word_saliencies[position].surface,
        ),
      );
    }
    list.append(
      el(
        "li",
        { class: "matched-row", "data-concept": String(match.concept_id) },
        link,
        triggers,
        el("span", { class: "contribution" }, `contribution ${formatNumber(match.contribution)}`),
      ),
    );
  }
  section.append(list);
  return section;
}

export async function renderPredictions(ctx: ViewContext): Promise<HTMLElement> {
  const projectId = ctx.state.project!;
  const root = el("div", { class: "view predictions-view" });
  const listing = await ctx.client.sentences(projectId);
  root.append(sentencePicker(listing, ctx));
  if (ctx.state.sentence === null) {
    root.append(el("div", { class: "empty-state" }, "Select a sentence to explain."));
    return root;
  }
  const explanation = await ctx.client.explanation(projectId, ctx.state.sentence);
  root.append(
    el(
      "section",
      { class: "explanation", "data-sentence": String(explanation.sentence_id) },
      el("h2", {}, `Sentence #${explanation.sentence_id}`),
      heatStrip(explanation),
      probabilitySection(explanation),
      matchedSection(explanation, ctx),
    ),
  );
  return root;
}
