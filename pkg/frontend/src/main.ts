/** Browser bootstrap: routing, rendering and key bindings.
 *
 * Routes: #/topics, #/judge/<topic>, #/summary/<topic>. The assessor's
 * bearer token is asked for once and kept in localStorage. Grading keys
 * 2/1/0/x post the grade and advance; n/p or the arrow keys navigate;
 * "/" focuses the in-document search box.
 */

import { ApiClient } from "./api.js";
import { highlight } from "./highlight.js";
import { JudgingSession } from "./session.js";
import {
  judgingView,
  retryBanner,
  summaryView,
  topicListView,
  type JudgingViewModel,
} from "./views.js";

const TOKEN_KEY = "judge-ui-token";

function requireToken(): string {
  let token = localStorage.getItem(TOKEN_KEY);
  while (!token) {
    token = window.prompt("assessor token");
    if (token) localStorage.setItem(TOKEN_KEY, token);
  }
  return token;
}

const root = document.getElementById("app");
if (root === null) throw new Error("missing #app container");
const app = root;

const api = new ApiClient("", requireToken());
const session = new JudgingSession(api);

let currentTitle = "";
let currentLevels: Record<string, string> = {};
let docHtmlRaw = "";
let searchQuery = "";
let lastRoute = "";

function render(html: string): void {
  app.innerHTML = html;
}

function renderError(error: unknown, retry: () => void): void {
  const message = error instanceof Error ? error.message : String(error);
  render(retryBanner(message));
  document.getElementById("retry")?.addEventListener("click", retry);
}

async function showTopics(): Promise<void> {
  try {
    const list = await api.topics();
    render(topicListView(list));
  } catch (error) {
    renderError(error, () => void showTopics());
  }
}

function judgingModel(): JudgingViewModel {
  const docId = session.currentDoc ?? "";
  const marked = highlight(docHtmlRaw, searchQuery);
  return {
    topicId: session.currentTopic ?? "",
    title: currentTitle,
    levels: currentLevels,
    docId,
    position: session.position,
    total: session.docQueue.length,
    judged: session.judgedCount(),
    grade: session.gradeOf(docId),
    docHtml: marked.html,
    searchQuery,
    searchCount: marked.count,
    pendingCount: session.pendingCount,
  };
}

function wireJudging(): void {
  for (const button of app.querySelectorAll<HTMLButtonElement>("button.grade")) {
    button.addEventListener("click", () => {
      void gradeAndAdvance(Number(button.dataset.grade));
    });
  }
  for (const button of app.querySelectorAll<HTMLButtonElement>("button.nav")) {
    button.addEventListener("click", () => {
      if (button.dataset.move === "next") session.next();
      else session.previous();
      void refreshDoc();
    });
  }
  const search = document.getElementById("doc-search") as HTMLInputElement | null;
  search?.addEventListener("input", () => {
    searchQuery = search.value;
    const marked = highlight(docHtmlRaw, searchQuery);
    const body = document.getElementById("doc-body");
    if (body) body.innerHTML = marked.html;
    const counter = app.querySelector(".matches");
    if (counter) counter.textContent = `${marked.count} match(es)`;
  });
}

async function refreshDoc(): Promise<void> {
  const docId = session.currentDoc;
  if (docId === null) return;
  try {
    docHtmlRaw = await api.docHtml(docId);
  } catch (error) {
    renderError(error, () => void refreshDoc());
    return;
  }
  render(judgingView(judgingModel()));
  wireJudging();
}

async function gradeAndAdvance(grade: number): Promise<void> {
  try {
    const acknowledged = await session.gradeCurrent(grade);
    if (!acknowledged) {
      renderError(new Error("judgment queued"), () => void gradeAndAdvance(grade));
      return;
    }
  } catch (error) {
    renderError(error, () => void refreshDoc());
    return;
  }
  session.next();
  await refreshDoc();
}

async function showJudging(topicId: string): Promise<void> {
  try {
    if (session.currentTopic !== topicId) {
      const list = await api.topics();
      const topic = list.topics.find((t) => t.topic_id === topicId);
      currentTitle = topic?.title ?? "";
      currentLevels = topic?.levels ?? {};
      await session.openTopic(topicId);
    }
    searchQuery = "";
    await refreshDoc();
  } catch (error) {
    renderError(error, () => void showJudging(topicId));
  }
}

async function showSummary(topicId: string): Promise<void> {
  try {
    if (session.currentTopic !== topicId) await session.openTopic(topicId);
    render(summaryView(topicId, session.distribution(), api.exportUrl()));
  } catch (error) {
    renderError(error, () => void showSummary(topicId));
  }
}

function route(): void {
  const hash = window.location.hash || "#/topics";
  lastRoute = hash;
  const judge = hash.match(/^#\/judge\/(.+)$/);
  const summary = hash.match(/^#\/summary\/(.+)$/);
  if (judge?.[1]) void showJudging(decodeURIComponent(judge[1]));
  else if (summary?.[1]) void showSummary(decodeURIComponent(summary[1]));
  else void showTopics();
}

document.addEventListener("keydown", (event) => {
  if (!lastRoute.startsWith("#/judge/")) return;
  const target = event.target as HTMLElement | null;
  if (target instanceof HTMLInputElement) return;
  const byKey: Record<string, number> = { "2": 2, "1": 1, "0": 0, x: -1 };
  if (event.key in byKey) {
    event.preventDefault();
    void gradeAndAdvance(byKey[event.key]!);
  } else if (event.key === "n" || event.key === "ArrowRight") {
    session.next();
    void refreshDoc();
  } else if (event.key === "p" || event.key === "ArrowLeft") {
    session.previous();
    void refreshDoc();
  } else if (event.key === "/") {
    event.preventDefault();
    document.getElementById("doc-search")?.focus();
  }
});

window.addEventListener("hashchange", route);
route();
