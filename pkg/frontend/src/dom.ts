/** Small DOM construction helpers; no framework, no templates. */

export type Child = Node | string;

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: Child[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (key === "class") node.className = value;
    else node.setAttribute(key, value);
  }
  for (const child of children) {
    node.append(child);
  }
  return node;
}

export function clear(node: HTMLElement): void {
  while (node.firstChild) node.removeChild(node.firstChild);
}

/** Replace a slot's content atomically. */
export function swap(slot: HTMLElement, ...children: Child[]): void {
  clear(slot);
  slot.append(...children);
}

export function formatNumber(value: number, digits = 3): string {
  return value.toFixed(digits);
}

export function formatPercent(value: number): string {
  return `${(value * 100).toFixed(1)}%`;
}
