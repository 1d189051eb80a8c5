// Pure HTML renderers. Every number shown is a field from a service
// response, formatted but never recomputed: the score decomposition
// (final / cosine / boost) must stay explainable against the backend.

import type {
  DecayResponse,
  InterestEntry,
  ProfileResponse,
  RecommendResponse,
  ResultRow,
  SearchResponse,
} from "./types.js";

export function escapeHtml(value: string): string {
  return value
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

export function formatScore(value: number): string {
  return value.toFixed(4);
}

function chip(text: string, cls: string): string {
  return `<span class="chip ${cls}">${escapeHtml(text)}</span>`;
}

function feedbackButtons(artifactId: string): string {
  const id = escapeHtml(artifactId);
  return (
    `<button class="feedback" data-artifact="${id}" data-signal="relevant">relevant</button>` +
    `<button class="feedback" data-artifact="${id}" data-signal="not_relevant">not relevant</button>`
  );
}

function resultTitle(row: ResultRow): string {
  const label = row.title.trim() ? row.title : row.artifact_id;
  const safe = escapeHtml(label);
  return row.url ? `<a href="${escapeHtml(row.url)}" target="_blank">${safe}</a>` : safe;
}

export function renderQueryEcho(response: SearchResponse): string {
  const { request } = response;
  const originals = request.original_terms
    .map((term) => chip(term, "term-original"))
    .join(" ");
  const expansions = Object.entries(request.expansion_terms)
    .map(([term, weight]) => chip(`${term} @${formatScore(weight)}`, "term-expansion"))
    .join(" ");
  return (
    `<div class="query-echo">` +
    `<div class="echo-row"><span class="echo-label">query terms</span>${originals}</div>` +
    `<div class="echo-row"><span class="echo-label">expansion</span>${expansions || "<em>none</em>"}</div>` +
    `<div class="echo-row"><span class="echo-label">flags</span>` +
    `k=${request.k} beta=${request.beta} strict=${request.strict} tau=${request.tau} expand=${request.expand}` +
    `</div></div>`
  );
}

export function renderResultsTable(rows: ResultRow[], withFeedback: boolean): string {
  if (rows.length === 0) {
    return `<p class="empty-state">No results. Try expanding the query or relaxing filters.</p>`;
  }
  const body = rows
    .map((row) => {
      const concepts = row.concepts.map((c) => chip(c, "concept")).join(" ");
      const matched = row.matched_terms.map((t) => chip(t, "matched")).join(" ");
      return (
        `<tr data-artifact="${escapeHtml(row.artifact_id)}">` +
        `<td class="rank">${row.rank}</td>` +
        `<td class="title">${resultTitle(row)}<div class="artifact-id">${escapeHtml(row.artifact_id)}</div></td>` +
        `<td class="kind">${escapeHtml(row.kind)}</td>` +
        `<td class="score final">${formatScore(row.final_score)}</td>` +
        `<td class="score cosine">${formatScore(row.cosine)}</td>` +
        `<td class="score overlap">${formatScore(row.interest_overlap)}</td>` +
        `<td class="matched">${matched}</td>` +
        `<td class="concepts">${concepts}</td>` +
        (withFeedback ? `<td class="actions">${feedbackButtons(row.artifact_id)}</td>` : "") +
        `</tr>`
      );
    })
    .join("");
  const feedbackHeader = withFeedback ? "<th>feedback</th>" : "";
  return (
    `<table class="results">` +
    `<thead><tr><th>#</th><th>artifact</th><th>kind</th>` +
    `<th>final</th><th>cosine</th><th>overlap</th>` +
    `<th>matched terms</th><th>concepts</th>${feedbackHeader}</tr></thead>` +
    `<tbody>${body}</tbody></table>`
  );
}

export function renderSearchView(response: SearchResponse, withFeedback: boolean): string {
  return renderQueryEcho(response) + renderResultsTable(response.results, withFeedback);
}

export function renderRecommendFeed(response: RecommendResponse): string {
  if (response.results.length === 0) {
    return `<p class="empty-state">Nothing left to browse.</p>`;
  }
  const notice = response.request.cold_start
    ? `<p class="cold-start">No interests yet, showing the newest artifacts. ` +
      `Search and give feedback to personalize this feed.</p>`
    : "";
  const cards = response.results
    .map((row) => {
      const driver = row.best_interest
        ? `<div class="card-driver">driven by ${chip(row.best_interest, "concept")}</div>`
        : "";
      return (
        `<div class="card" data-artifact="${escapeHtml(row.artifact_id)}">` +
        `<div class="card-head"><span class="rank">#${row.rank}</span> ${resultTitle(row)}</div>` +
        `<div class="card-meta">${escapeHtml(row.kind)} · score ${formatScore(row.final_score)}` +
        (row.created_at ? ` · ${escapeHtml(row.created_at.slice(0, 10))}` : "") +
        `</div>` +
        `<div class="card-concepts">${row.concepts.map((c) => chip(c, "concept")).join(" ")}</div>` +
        driver +
        `<div class="card-actions">${feedbackButtons(row.artifact_id)}</div>` +
        `</div>`
      );
    })
    .join("");
  return `${notice}<div class="feed">${cards}</div>`;
}

function interestAgeDays(entry: InterestEntry, nowIso: string): number {
  const now = Date.parse(nowIso);
  const updated = Date.parse(entry.last_updated);
  return Math.max(0, Math.round((now - updated) / 86_400_000));
}

export function renderInterests(
  interests: Record<string, InterestEntry>,
  nowIso: string,
): string {
  const entries = Object.entries(interests).sort((a, b) => b[1].weight - a[1].weight);
  if (entries.length === 0) {
    return `<p class="empty-state">No interests yet.</p>`;
  }
  const maxWeight = Math.max(...entries.map(([, e]) => e.weight));
  const rows = entries
    .map(([concept, entry]) => {
      const width = maxWeight > 0 ? Math.max(2, (entry.weight / maxWeight) * 100) : 2;
      return (
        `<div class="interest-row">` +
        `<span class="interest-concept">${escapeHtml(concept)}</span>` +
        `<span class="interest-bar"><span class="interest-fill" style="width:${width.toFixed(1)}%"></span></span>` +
        `<span class="interest-weight">${formatScore(entry.weight)}</span>` +
        `<span class="interest-age">${interestAgeDays(entry, nowIso)}d ago</span>` +
        `</div>`
      );
    })
    .join("");
  return `<div class="interests">${rows}</div>`;
}

export function renderDecayPreview(response: DecayResponse): string {
  const entries = Object.entries(response.interests).sort(
    (a, b) => b[1].weight - a[1].weight,
  );
  const mode = response.dry_run ? "preview (not saved)" : "applied";
  const rows =
    entries
      .map(
        ([concept, entry]) =>
          `<tr><td>${escapeHtml(concept)}</td><td class="score decayed">${formatScore(entry.weight)}</td></tr>`,
      )
      .join("") || `<tr><td colspan="2"><em>all interests decayed away</em></td></tr>`;
  return (
    `<div class="decay-preview"><h4>Decay to ${escapeHtml(response.request.now)} — ${mode}</h4>` +
    `<table class="decay"><thead><tr><th>concept</th><th>weight</th></tr></thead>` +
    `<tbody>${rows}</tbody></table></div>`
  );
}

function dimensionList(title: string, items: string[]): string {
  const content = items.length
    ? items.map((item) => chip(item, "dim")).join(" ")
    : "<em>not disclosed</em>";
  return `<div class="dimension-item"><span class="dim-label">${escapeHtml(title)}</span>${content}</div>`;
}

export function renderProfileView(profile: ProfileResponse, nowIso: string): string {
  const personal = profile.personal;
  const personalBits = [
    personal.age !== null ? `age ${personal.age}` : null,
    personal.location,
    personal.job_title,
    personal.years_experience !== null ? `${personal.years_experience}y experience` : null,
    ...personal.social_ids,
  ].filter((x): x is string => typeof x === "string" && x.length > 0);
  const quality = profile.quality.last_eval
    ? Object.entries(profile.quality.last_eval)
        .map(([metric, value]) => `${escapeHtml(metric)}=${formatScore(value)}`)
        .join(" · ")
    : "<em>no evaluation run yet</em>";
  return (
    `<div class="profile">` +
    `<h3>${escapeHtml(profile.user_id)} <span class="pseudo">(pseudonymous)</span></h3>` +
    `<section><h4>1 · Personal</h4>${dimensionList("about", personalBits)}</section>` +
    `<section><h4>2 · Domain of interest</h4>` +
    dimensionList("dev domains", profile.domain_of_interest.dev_domains) +
    dimensionList("app methods", profile.domain_of_interest.app_methods) +
    dimensionList("methodologies", profile.domain_of_interest.methodologies) +
    dimensionList("repo hosts", profile.domain_of_interest.repo_hosts) +
    dimensionList("languages", profile.domain_of_interest.languages) +
    dimensionList("IDEs", profile.domain_of_interest.ides) +
    `</section>` +
    `<section><h4>3 · Software project</h4>` +
    dimensionList("requirements", profile.software_project.requirements) +
    dimensionList("modeling", profile.software_project.modeling) +
    dimensionList("paradigm", profile.software_project.paradigm) +
    dimensionList("frontend tools", profile.software_project.frontend_tools) +
    dimensionList("backend tools", profile.software_project.backend_tools) +
    `</section>` +
    `<section><h4>4 · Development environment</h4>` +
    dimensionList("infrastructure", profile.dev_environment.infrastructure) +
    dimensionList("backend servers", profile.dev_environment.backend_servers) +
    dimensionList("testing tools", profile.dev_environment.testing_tools) +
    dimensionList("debugging tools", profile.dev_environment.debugging_tools) +
    `</section>` +
    `<section><h4>5 · Security</h4>` +
    dimensionList("policy", [
      "identity undisclosed",
      profile.security.share_social ? "shares social ids" : "social ids private",
    ]) +
    `</section>` +
    `<section><h4>6 · Temporal — interests</h4>` +
    renderInterests(profile.interests, nowIso) +
    `<div class="decay-control">` +
    `<label>simulate decay to <input type="date" id="decay-date"></label> ` +
    `<button id="decay-simulate">preview</button>` +
    `<div id="decay-output"></div></div>` +
    `</section>` +
    `<section><h4>7 · Delivery</h4>` +
    dimensionList("settings", [
      `default k = ${profile.delivery.default_k}`,
      profile.delivery.strict_filter ? "strict filtering on" : "strict filtering off",
    ]) +
    `</section>` +
    `<section><h4>8 · Quality</h4><div class="dimension-item">${quality}</div></section>` +
    `</div>`
  );
}

export function renderCreateProfileForm(userId: string): string {
  return (
    `<div class="create-profile">` +
    `<p>No profile for <strong>${escapeHtml(userId)}</strong> yet. Create one:</p>` +
    `<form id="create-profile-form">` +
    `<input type="hidden" name="user_id" value="${escapeHtml(userId)}">` +
    `<label>dev domains (comma-separated) <input name="dev_domains" placeholder="health, education"></label>` +
    `<label>methodologies <input name="methodologies" placeholder="scrum, waterfall"></label>` +
    `<label>languages <input name="languages" placeholder="kotlin, dart"></label>` +
    `<label>interest concepts <input name="interest_concepts" placeholder="mad:Tutorial"></label>` +
    `<button type="submit">create profile</button>` +
    `</form></div>`
  );
}

export function renderErrorBanner(message: string): string {
  return `<div class="error-banner">${escapeHtml(message)}</div>`;
}
