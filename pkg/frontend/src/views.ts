/** HTML builders for the three screens.
 *
 * Pure string functions so they can be tested without a browser;
 * main.ts attaches them to the page and wires the events. Everything
 * interpolated from server data is escaped here.
 */

import type { TopicList, TopicSummary } from "./api.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function progressPercent(judged: number, total: number): number {
  if (total <= 0) return 0;
  return Math.round((100 * judged) / total);
}

export const GRADE_LABELS: Record<string, string> = {
  "2": "highly relevant",
  "1": "somewhat relevant",
  "0": "not relevant",
  "-1": "cannot render",
};

export const GRADE_KEYS: Record<string, string> = {
  "2": "2",
  "1": "1",
  "0": "0",
  "-1": "x",
};

function levelRows(levels: Record<string, string>): string {
  const order = ["2", "1", "0"];
  const rows = order
    .filter((value) => levels[value] !== undefined)
    .map(
      (value) =>
        `<dt>${value} (${escapeHtml(GRADE_LABELS[value] ?? "")})</dt>` +
        `<dd>${escapeHtml(levels[value] ?? "")}</dd>`,
    );
  return rows.length === 0 ? "" : `<dl class="levels">${rows.join("")}</dl>`;
}

function topicRow(topic: TopicSummary): string {
  const percent = progressPercent(topic.judged, topic.total);
  const complete = topic.total > 0 && topic.judged >= topic.total;
  return [
    `<li class="topic${complete ? " complete" : ""}" data-topic="${escapeHtml(topic.topic_id)}">`,
    `<h2><a href="#/judge/${escapeHtml(topic.topic_id)}">` +
      `${escapeHtml(topic.topic_id)}: ${escapeHtml(topic.title)}</a></h2>`,
    `<div class="progress"><div class="bar" style="width:${percent}%"></div></div>`,
    `<p class="count">${topic.judged}/${topic.total} judged` +
      `${complete ? " (complete)" : ""}</p>`,
    levelRows(topic.levels),
    `<p><a href="#/summary/${escapeHtml(topic.topic_id)}">summary</a></p>`,
    "</li>",
  ].join("");
}

export function topicListView(list: TopicList): string {
  const rows = list.topics.map(topicRow).join("");
  return [
    `<h1>topics for ${escapeHtml(list.assessor_id)}</h1>`,
    `<ul class="topics">${rows}</ul>`,
  ].join("");
}

export function gradeButtons(
  levels: Record<string, string>,
  selected: number | undefined,
): string {
  const buttons = ["2", "1", "0", "-1"]
    .map((value) => {
      const description = levels[value];
      const label = GRADE_LABELS[value] ?? value;
      const key = GRADE_KEYS[value] ?? "";
      const current = selected !== undefined && String(selected) === value;
      const title = description ? ` title="${escapeHtml(description)}"` : "";
      return (
        `<button class="grade${current ? " selected" : ""}" ` +
        `data-grade="${value}"${title}>` +
        `[${key}] ${escapeHtml(label)}</button>`
      );
    })
    .join("");
  return `<div class="grades">${buttons}</div>`;
}

export interface JudgingViewModel {
  topicId: string;
  title: string;
  levels: Record<string, string>;
  docId: string;
  position: number;
  total: number;
  judged: number;
  grade: number | undefined;
  docHtml: string;
  searchQuery: string;
  searchCount: number;
  pendingCount: number;
}

export function judgingView(model: JudgingViewModel): string {
  const counter = model.searchQuery
    ? `<span class="matches">${model.searchCount} match(es)</span>`
    : "";
  const pending =
    model.pendingCount > 0
      ? `<span class="pending">${model.pendingCount} unsent</span>`
      : "";
  return [
    `<header>`,
    `<a href="#/topics">&larr; topics</a>`,
    `<h1>${escapeHtml(model.topicId)}: ${escapeHtml(model.title)}</h1>`,
    `<p class="where">doc ${model.position + 1} of ${model.total} ` +
      `(${escapeHtml(model.docId)}), ${model.judged}/${model.total} judged ` +
      `${pending}</p>`,
    `</header>`,
    `<nav>`,
    `<button class="nav" data-move="previous">[p] previous</button>`,
    `<button class="nav" data-move="next">[n] next</button>`,
    `<input type="search" id="doc-search" placeholder="search in document" ` +
      `value="${escapeHtml(model.searchQuery)}"> ${counter}`,
    `</nav>`,
    gradeButtons(model.levels, model.grade),
    `<article id="doc-body">${model.docHtml}</article>`,
  ].join("\n");
}

/** "20 somewhat / 30 highly" style summary of judged grades. */
export function distributionLine(
  counts: Record<"2" | "1" | "0" | "-1", number>,
): string {
  return `${counts["1"]} somewhat / ${counts["2"]} highly`;
}

export function summaryView(
  topicId: string,
  counts: Record<"2" | "1" | "0" | "-1", number>,
  exportHref: string,
): string {
  const rows = (["2", "1", "0", "-1"] as const)
    .map(
      (value) =>
        `<tr><td>${value}</td><td>${escapeHtml(GRADE_LABELS[value] ?? "")}</td>` +
        `<td>${counts[value]}</td></tr>`,
    )
    .join("");
  return [
    `<a href="#/topics">&larr; topics</a>`,
    `<h1>summary: ${escapeHtml(topicId)}</h1>`,
    `<p class="headline">${distributionLine(counts)}</p>`,
    `<table class="distribution">`,
    `<thead><tr><th>grade</th><th></th><th>docs</th></tr></thead>`,
    `<tbody>${rows}</tbody>`,
    `</table>`,
    `<p><a href="${escapeHtml(exportHref)}">export qrels</a></p>`,
  ].join("\n");
}

export function retryBanner(message: string): string {
  return (
    `<div class="banner" role="alert">` +
    `<p>server unreachable: ${escapeHtml(message)}</p>` +
    `<p>nothing was lost; unsent judgments stay queued.</p>` +
    `<button id="retry">retry</button>` +
    `</div>`
  );
}
