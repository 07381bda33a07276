/** The annotation screen: one task at a time, staged candidate lists. */

import { ApiClient, ApiError, TaskView } from "./api.js";

interface TaskViewModel {
  view: TaskView | null; // null = everything annotated
  selectedIndex: number | null;
  manualText: string;
  error: string | null;
}

const STAGE_TITLES: Record<TaskView["stage"], string> = {
  LINKS: "Labels linked from the first paragraph",
  NOUN_PHRASES: "Noun phrases from the first paragraph",
  MANUAL: "No list matched — type the correct label",
};

export class TaskScreen {
  private model: TaskViewModel = {
    view: null,
    selectedIndex: null,
    manualText: "",
    error: null,
  };

  constructor(
    private readonly root: HTMLElement,
    private readonly client: ApiClient
  ) {}

  /** Fetch the current task; the server resets it to the earliest stage. */
  async load(): Promise<void> {
    this.model = {
      view: await this.client.task(),
      selectedIndex: null,
      manualText: "",
      error: null,
    };
    this.render();
  }

  private show(view: TaskView): void {
    this.model = { view, selectedIndex: null, manualText: "", error: null };
    this.render();
  }

  /** Stale-task conflicts refetch automatically; other errors banner. */
  private async guard(action: () => Promise<void>): Promise<void> {
    try {
      await action();
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        await this.load();
        return;
      }
      this.model.error = error instanceof Error ? error.message : String(error);
      this.render();
    }
  }

  private async annotate(): Promise<void> {
    const view = this.model.view;
    if (!view) return;
    await this.guard(async () => {
      if (view.stage === "MANUAL") {
        const text = this.model.manualText.trim();
        if (!text) return;
        await this.client.annotate(view.entity_id, text);
      } else {
        const index = this.model.selectedIndex;
        if (index === null) return;
        const label = view.labels[index];
        if (label === undefined) return;
        await this.client.annotate(view.entity_id, label, index);
      }
      await this.load();
    });
  }

  private async reject(): Promise<void> {
    const view = this.model.view;
    if (!view) return;
    await this.guard(async () => {
      this.show(await this.client.reject(view.entity_id));
    });
  }

  private async skip(): Promise<void> {
    const view = this.model.view;
    if (!view) return;
    await this.guard(async () => {
      await this.client.skip(view.entity_id);
      await this.load();
    });
  }

  render(): void {
    const { view, selectedIndex, manualText, error } = this.model;
    this.root.replaceChildren();

    if (error !== null) {
      const banner = el("div", "banner");
      banner.append(el("span", "banner-text", error));
      const dismiss = button("dismiss", "Dismiss", () => {
        this.model.error = null;
        this.render();
      });
      banner.append(dismiss);
      this.root.append(banner);
    }

    if (view === null) {
      const done = el("div", "all-done");
      done.append(el("h2", "", "All done"));
      done.append(el("p", "", "Every entity has been annotated or skipped."));
      this.root.append(done);
      return;
    }

    this.root.append(el("h2", "entity-name", view.entity_name));
    this.root.append(el("p", "first-paragraph", view.first_paragraph));
    this.root.append(el("p", "stage-title", STAGE_TITLES[view.stage]));

    const isManual = view.stage === "MANUAL";

    if (!isManual) {
      const list = document.createElement("ul");
      list.className = "label-list";
      view.labels.forEach((label, index) => {
        const item = document.createElement("li");
        const row = document.createElement("label");
        const radio = document.createElement("input");
        radio.type = "radio";
        radio.name = "candidate";
        radio.value = String(index);
        radio.checked = selectedIndex === index;
        radio.addEventListener("change", () => {
          this.model.selectedIndex = index;
          this.render();
        });
        row.append(radio, el("span", "label-text", label));
        item.append(row);
        list.append(item);
      });
      this.root.append(list);
    }

    const manualInput = document.createElement("input");
    manualInput.type = "text";
    manualInput.className = "manual-input";
    manualInput.placeholder = isManual
      ? "Type the correct label"
      : "Unlocked after rejecting both lists";
    manualInput.value = manualText;
    manualInput.disabled = !isManual; // never enabled while a list is active
    manualInput.addEventListener("input", () => {
      this.model.manualText = manualInput.value;
      this.renderButtons();
    });
    this.root.append(manualInput);

    const actions = el("div", "actions");
    actions.append(
      button("annotate", "Annotate", () => void this.annotate()),
      ...(isManual ? [] : [button("reject", "Not in this list", () => void this.reject())]),
      button("skip", "Skip Page", () => void this.skip())
    );
    this.root.append(actions);
    this.renderButtons();
  }

  /** Keep the annotate button in sync without rebuilding the whole screen. */
  private renderButtons(): void {
    const view = this.model.view;
    const annotate = this.root.querySelector<HTMLButtonElement>("button.annotate");
    if (!view || !annotate) return;
    annotate.disabled =
      view.stage === "MANUAL"
        ? this.model.manualText.trim() === ""
        : this.model.selectedIndex === null;
  }
}

function el(tag: string, className: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function button(className: string, text: string, onClick: () => void): HTMLButtonElement {
  const node = document.createElement("button");
  node.type = "button";
  node.className = className;
  node.textContent = text;
  node.addEventListener("click", onClick);
  return node;
}
