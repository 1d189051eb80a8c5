// DOM wiring: tabs, the search/feedback loop, the browse feed and the
// profile page. All state flows through the DevRecClient; rendering is
// delegated to the pure functions in render.ts.

import { ApiRequestError, DevRecClient } from "./api.js";
import {
  renderCreateProfileForm,
  renderDecayPreview,
  renderErrorBanner,
  renderProfileView,
  renderRecommendFeed,
  renderSearchView,
} from "./render.js";

declare global {
  interface Window {
    DEVREC_URL?: string;
  }
}

function apiBase(): string {
  const fromQuery = new URLSearchParams(window.location.search).get("api");
  return (fromQuery || window.DEVREC_URL || "http://127.0.0.1:8080").replace(/\/$/, "");
}

const client = new DevRecClient(apiBase());

const el = (id: string): HTMLElement => {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node;
};

function currentUser(): string {
  return (el("user-input") as HTMLInputElement).value.trim();
}

function showError(container: HTMLElement, error: unknown): void {
  const message =
    error instanceof ApiRequestError
      ? `${error.code}: ${error.message}`
      : "service unreachable - is `devrec serve` running?";
  container.innerHTML = renderErrorBanner(message);
}

// --- search tab -------------------------------------------------------------

let lastQuery: string | null = null;

async function runSearch(): Promise<void> {
  const query = (el("query-input") as HTMLInputElement).value.trim();
  if (!query) return;
  lastQuery = query;
  const container = el("search-results");
  container.innerHTML = `<p class="loading">searching…</p>`;
  try {
    const user = currentUser();
    const response = await client.search(query, {
      user: user || undefined,
      k: Number((el("k-input") as HTMLInputElement).value) || 10,
      strict: (el("strict-input") as HTMLInputElement).checked,
      expand: (el("expand-input") as HTMLInputElement).checked,
    });
    container.innerHTML = renderSearchView(response, Boolean(user));
  } catch (error) {
    showError(container, error);
  }
}

// --- browse tab -------------------------------------------------------------

const FEED_PAGE = 12;
let feedSize = FEED_PAGE;

async function loadFeed(reset = false): Promise<void> {
  const container = el("feed-results");
  const user = currentUser();
  if (!user) {
    container.innerHTML = renderErrorBanner("enter a user id to browse recommendations");
    return;
  }
  if (reset) feedSize = FEED_PAGE;
  container.innerHTML = `<p class="loading">loading feed…</p>`;
  try {
    const feed = await client.recommend(user, feedSize);
    const more =
      feed.results.length >= feedSize
        ? `<button id="feed-more">show more</button>`
        : "";
    container.innerHTML = renderRecommendFeed(feed) + more;
    document.getElementById("feed-more")?.addEventListener("click", () => {
      feedSize += FEED_PAGE;
      void loadFeed();
    });
  } catch (error) {
    showError(container, error);
  }
}

// --- profile tab ------------------------------------------------------------

async function loadProfile(): Promise<void> {
  const container = el("profile-view");
  const user = currentUser();
  if (!user) {
    container.innerHTML = renderErrorBanner("enter a user id to view a profile");
    return;
  }
  container.innerHTML = `<p class="loading">loading profile…</p>`;
  try {
    const profile = await client.profile(user);
    container.innerHTML = renderProfileView(profile, new Date().toISOString());
    wireDecayControl(user);
  } catch (error) {
    if (error instanceof ApiRequestError && error.status === 404) {
      container.innerHTML = renderCreateProfileForm(user);
      wireCreateProfileForm(container);
    } else {
      showError(container, error);
    }
  }
}

function wireDecayControl(user: string): void {
  const button = document.getElementById("decay-simulate");
  if (!button) return;
  button.addEventListener("click", async () => {
    const output = el("decay-output");
    const date = (el("decay-date") as HTMLInputElement).value;
    const now = date ? `${date}T00:00:00+00:00` : undefined;
    try {
      output.innerHTML = renderDecayPreview(await client.decay(user, now, true));
    } catch (error) {
      showError(output, error);
    }
  });
}

function wireCreateProfileForm(container: HTMLElement): void {
  const form = container.querySelector<HTMLFormElement>("#create-profile-form");
  if (!form) return;
  form.addEventListener("submit", async (event) => {
    event.preventDefault();
    const data = new FormData(form);
    const csv = (name: string): string[] =>
      String(data.get(name) ?? "")
        .split(",")
        .map((s) => s.trim())
        .filter(Boolean);
    try {
      await client.createProfile({
        user_id: String(data.get("user_id")),
        domain_of_interest: {
          dev_domains: csv("dev_domains"),
          methodologies: csv("methodologies"),
          languages: csv("languages"),
        },
        interest_concepts: csv("interest_concepts"),
      });
      await loadProfile();
    } catch (error) {
      showError(container, error);
    }
  });
}

// --- feedback (event delegation over both tabs) ------------------------------

async function handleFeedbackClick(target: HTMLElement): Promise<void> {
  const artifact = target.dataset.artifact;
  const signal = target.dataset.signal as "relevant" | "not_relevant" | undefined;
  const user = currentUser();
  if (!artifact || !signal) return;
  if (!user) {
    window.alert("enter a user id first - feedback is per profile");
    return;
  }
  target.textContent = "…";
  (target as HTMLButtonElement).disabled = true;
  try {
    await client.feedback(user, artifact, signal);
    // reconcile: feedback only moves the boost term, so re-fetch the view
    if (el("tab-search").classList.contains("active") && lastQuery) {
      await runSearch();
    } else if (el("tab-browse").classList.contains("active")) {
      await loadFeed();
    }
  } catch (error) {
    showError(el("global-errors"), error);
  }
}

// --- tabs and boot ------------------------------------------------------------

function activateTab(name: "search" | "browse" | "profile"): void {
  for (const tab of ["search", "browse", "profile"] as const) {
    el(`tab-${tab}`).classList.toggle("active", tab === name);
    el(`panel-${tab}`).classList.toggle("hidden", tab !== name);
  }
  if (name === "browse") void loadFeed(true);
  if (name === "profile") void loadProfile();
}

export function boot(): void {
  el("tab-search").addEventListener("click", () => activateTab("search"));
  el("tab-browse").addEventListener("click", () => activateTab("browse"));
  el("tab-profile").addEventListener("click", () => activateTab("profile"));
  el("search-form").addEventListener("submit", (event) => {
    event.preventDefault();
    void runSearch();
  });
  document.body.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    if (target.matches("button.feedback")) {
      void handleFeedbackClick(target);
    }
  });
  void client
    .health()
    .then((health) => {
      el("health-line").textContent = `connected · ${health.indexed} artifacts indexed`;
    })
    .catch(() => {
      el("health-line").innerHTML = renderErrorBanner(
        `cannot reach ${client.baseUrl} - start the service with \`devrec serve\``,
      );
    });
  activateTab("search");
}

boot();
