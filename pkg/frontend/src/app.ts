/** Single-page shell: owns the URL <-> state mapping, the navigation
 * chrome, and the one content slot. Renders are sequence-guarded so a
 * slow response never overwrites a newer view (last write wins). */

import { ApiClient, ApiError } from "./api.js";
import { el, swap } from "./dom.js";
import { parseViewState, serializeViewState, ViewName, ViewState } from "./state.js";
import { renderConcepts } from "./views/concepts.js";
import { errorBanner, renderOverview, ViewContext } from "./views/overview.js";
import { renderPredictions } from "./views/predictions.js";

const VIEW_TABS: { view: ViewName; label: string }[] = [
  { view: "overview", label: "Overview" },
  { view: "concepts", label: "Concepts" },
  { view: "predictions", label: "Predictions" },
];

export interface AppOptions {
  client: ApiClient;
  root: HTMLElement;
  window: Window;
}

export class App {
  readonly client: ApiClient;
  private readonly root: HTMLElement;
  private readonly win: Window;
  private readonly tabs: HTMLElement;
  private readonly slot: HTMLElement;
  private seq = 0;
  state: ViewState;

  constructor(options: AppOptions) {
    this.client = options.client;
    this.root = options.root;
    this.win = options.window;
    this.state = parseViewState(this.win.location.search);
    this.tabs = el("nav", { class: "tabs" });
    this.slot = el("main", { class: "view-slot" });
  }

  start(): void {
    swap(this.root, el("header", { class: "topbar" }, el("h1", {}, "conceptlens"), this.tabs), this.slot);
    this.win.addEventListener("popstate", () => {
      this.state = parseViewState(this.win.location.search);
      void this.render();
    });
    void this.render();
  }

  /** Push the new state onto the history and re-render. */
  navigate(next: ViewState): void {
    this.state = next;
    const query = serializeViewState(next);
    this.win.history.pushState(null, "", query === "" ? this.win.location.pathname : query);
    void this.render();
  }

  private context(): ViewContext {
    return {
      client: this.client,
      state: this.state,
      navigate: (next) => this.navigate(next),
    };
  }

  private renderTabs(): void {
    const buttons = VIEW_TABS.map(({ view, label }) => {
      const button = el("button", { class: "tab", type: "button", "data-view": view }, label);
      if (view === this.state.view) button.classList.add("active");
      button.addEventListener("click", () => {
        const next: ViewState = { ...this.state, view };
        if (view === "concepts") next.concept = null;
        this.navigate(next);
      });
      return button;
    });
    swap(this.tabs, ...buttons);
  }

  private async projectPicker(): Promise<HTMLElement> {
    const listing = await this.client.listProjects();
    const panel = el("div", { class: "view project-picker" }, el("h2", {}, "Projects"));
    if (listing.items.length === 0) {
      panel.append(el("div", { class: "empty-state" }, "No projects on this server yet."));
      return panel;
    }
    const list = el("ul", { class: "project-list" });
    for (const project of listing.items) {
      const item = el(
        "li",
        { class: "project-row", "data-project": project.project_id },
        el("button", { class: "project-link", type: "button" }, project.name),
        el("span", { class: "project-state" }, project.state),
      );
      item.querySelector("button")!.addEventListener("click", () => {
        this.navigate({ ...this.state, project: project.project_id });
      });
      list.append(item);
    }
    panel.append(list);
    return panel;
  }

  async render(): Promise<void> {
    const mySeq = ++this.seq;
    this.renderTabs();
    let view: HTMLElement;
    try {
      if (this.state.project === null) {
        view = await this.projectPicker();
      } else {
        switch (this.state.view) {
          case "overview":
            view = await renderOverview(this.context());
            break;
          case "concepts":
            view = await renderConcepts(this.context());
            break;
          case "predictions":
            view = await renderPredictions(this.context());
            break;
        }
      }
    } catch (error) {
      view =
        error instanceof ApiError
          ? errorBanner(`${error.code} (HTTP ${error.status})`, error.message)
          : errorBanner("Unexpected error", String(error));
    }
    if (mySeq !== this.seq) return;
    swap(this.slot, view);
  }
}
