/** Mounts the app against the recorded-fixture server inside jsdom. */

import { ApiClient } from "../src/api.js";
import { App } from "../src/app.js";
import { fixtureServer, FixtureServer, Responder, settle } from "./fixture.js";

export interface Mounted {
  app: App;
  root: HTMLElement;
  server: FixtureServer;
}

export async function mount(
  search: string,
  overrides: Record<string, Responder> = {},
): Promise<Mounted> {
  const server = fixtureServer(overrides);
  window.history.replaceState(
    null,
    "",
    search === "" ? window.location.pathname : search,
  );
  const root = document.createElement("div");
  document.body.append(root);
  const app = new App({
    client: new ApiClient("/api/v1", server.fetch),
    root,
    window,
  });
  app.start();
  await settle();
  return { app, root, server };
}

export function text(root: ParentNode, selector: string): string {
  const node = root.querySelector(selector);
  if (node === null) throw new Error(`no element matches ${selector}`);
  return node.textContent ?? "";
}

export function click(root: ParentNode, selector: string): void {
  const node = root.querySelector<HTMLElement>(selector);
  if (node === null) throw new Error(`no element matches ${selector}`);
  node.click();
}

export async function selectValue(
  root: ParentNode,
  selector: string,
  value: string,
): Promise<void> {
  const select = root.querySelector<HTMLSelectElement>(selector);
  if (select === null) throw new Error(`no element matches ${selector}`);
  select.value = value;
  select.dispatchEvent(new Event("change", { bubbles: true }));
  await settle();
}
