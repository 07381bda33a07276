/** Annotation-progress screen: breakdown bars by label source. */

import { ApiClient, StatsView } from "./api.js";

const SOURCES = ["LINKS", "NOUN_PHRASES", "MANUAL"] as const;

export class StatsScreen {
  constructor(
    private readonly root: HTMLElement,
    private readonly client: ApiClient
  ) {}

  async load(): Promise<void> {
    this.render(await this.client.stats());
  }

  render(stats: StatsView): void {
    this.root.replaceChildren();
    this.root.append(heading("Annotation breakdown by label source"));

    if (stats.breakdown.total === 0) {
      const empty = document.createElement("p");
      empty.className = "empty-state";
      empty.textContent = "No annotations yet.";
      this.root.append(empty);
    } else {
      const max = Math.max(...SOURCES.map((s) => stats.breakdown[s]), 1);
      const chart = document.createElement("div");
      chart.className = "chart";
      for (const source of SOURCES) {
        const count = stats.breakdown[source];
        const row = document.createElement("div");
        row.className = "chart-row";
        const name = document.createElement("span");
        name.className = "chart-label";
        name.textContent = source;
        const bar = document.createElement("div");
        bar.className = `bar bar-${source.toLowerCase()}`;
        bar.style.width = `${Math.round((count / max) * 100)}%`;
        bar.dataset.count = String(count);
        const value = document.createElement("span");
        value.className = "chart-count";
        value.textContent = String(count);
        row.append(name, bar, value);
        chart.append(row);
      }
      this.root.append(chart);
      const total = document.createElement("p");
      total.className = "total";
      total.textContent = `Total ${stats.breakdown.total}, skipped ${stats.skipped}`;
      this.root.append(total);
    }

    const agreement = document.createElement("p");
    agreement.className = "agreement";
    agreement.textContent =
      stats.first_link_agreement === null
        ? "First-link agreement: n/a"
        : `First-link agreement: ${(stats.first_link_agreement * 100).toFixed(1)}%`;
    this.root.append(agreement);

    const refresh = document.createElement("button");
    refresh.type = "button";
    refresh.className = "refresh";
    refresh.textContent = "Refresh";
    refresh.addEventListener("click", () => void this.load());
    this.root.append(refresh);
  }
}

function heading(text: string): HTMLElement {
  const node = document.createElement("h2");
  node.textContent = text;
  return node;
}
