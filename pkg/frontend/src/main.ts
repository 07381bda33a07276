/** App shell: login, then an Annotate/Stats tab pair over one ApiClient. */

import { ApiClient, ApiError } from "./api.js";
import { StatsScreen } from "./stats.js";
import { TaskScreen } from "./task.js";

const TOKEN_KEY = "shade-token";

export function mountApp(root: HTMLElement, client?: ApiClient): void {
  const api = client ?? new ApiClient("", sessionStorage.getItem(TOKEN_KEY));
  if (api.hasToken()) {
    mountTabs(root, api);
  } else {
    mountLogin(root, api);
  }
}

function mountLogin(root: HTMLElement, api: ApiClient): void {
  root.replaceChildren();
  const form = document.createElement("form");
  form.className = "login";
  const input = document.createElement("input");
  input.type = "text";
  input.name = "name";
  input.placeholder = "Annotator name";
  const submit = document.createElement("button");
  submit.type = "submit";
  submit.textContent = "Start annotating";
  const message = document.createElement("p");
  message.className = "login-error";
  form.append(input, submit, message);
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    void (async () => {
      try {
        const token = await api.login(input.value.trim());
        sessionStorage.setItem(TOKEN_KEY, token);
        mountTabs(root, api);
      } catch (error) {
        message.textContent =
          error instanceof ApiError && error.status === 403
            ? "Unknown annotator name."
            : `Login failed: ${error instanceof Error ? error.message : error}`;
      }
    })();
  });
  root.replaceChildren(form);
}

function mountTabs(root: HTMLElement, api: ApiClient): void {
  root.replaceChildren();
  const nav = document.createElement("nav");
  const annotateTab = tabButton("tab-annotate", "Annotate");
  const statsTab = tabButton("tab-stats", "Stats");
  nav.append(annotateTab, statsTab);
  const screen = document.createElement("main");
  screen.className = "screen";
  root.append(nav, screen);

  const taskScreen = new TaskScreen(screen, api);
  const statsScreen = new StatsScreen(screen, api);

  annotateTab.addEventListener("click", () => void taskScreen.load());
  statsTab.addEventListener("click", () => void statsScreen.load());
  void taskScreen.load();
}

function tabButton(className: string, text: string): HTMLButtonElement {
  const node = document.createElement("button");
  node.type = "button";
  node.className = className;
  node.textContent = text;
  return node;
}

declare global {
  interface Window {
    shadeMount?: typeof mountApp;
  }
}

if (typeof document !== "undefined") {
  window.shadeMount = mountApp;
  const root = document.getElementById("app");
  if (root) mountApp(root);
}
