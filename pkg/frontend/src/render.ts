// HTML-string renderers. Pure functions of the API payloads so the UI
// contract is testable without a browser; main.ts assigns the results to
// innerHTML.

import type {
  ChatBubble,
  ChatState,
} from "./state.js";
import { revisionBumped } from "./state.js";
import type {
  CitationDetail,
  PendingCheck,
  PlanSnapshot,
  ScaffoldLevel,
} from "./types.js";
import { PHASE_LABELS } from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;")
    .replaceAll("'", "&#39;");
}

export function renderScaffoldBadge(level: ScaffoldLevel): string {
  const phase = PHASE_LABELS[level];
  return `<span class="scaffold-badge scaffold-${level.toLowerCase()}">${escapeHtml(phase)}</span>`;
}

export function renderPlanSidebar(state: ChatState): string {
  const plan = state.plan;
  if (!plan) {
    return `<div class="plan-empty">No learning plan yet. Ask about a topic to get one.</div>`;
  }
  const badge = revisionBumped(state, plan)
    ? `<span class="revision-badge">revised r${plan.revision}</span>`
    : "";
  const items = plan.steps
    .map(
      (step) =>
        `<li class="plan-step plan-step-${step.status.toLowerCase()}" data-index="${step.index}">` +
        `<span class="step-status">${escapeHtml(step.status)}</span>` +
        `<span class="step-title">${escapeHtml(step.title)}</span>` +
        `</li>`
    )
    .join("");
  return (
    `<div class="plan-header"><h2>${escapeHtml(plan.topic)}</h2>${badge}</div>` +
    `<ol class="plan-steps">${items}</ol>`
  );
}

export function renderCitations(citations: CitationDetail[]): string {
  if (!citations.length) {
    return "";
  }
  const markers = citations
    .map(
      (c, i) =>
        `<details class="citation"><summary class="citation-marker">[${i + 1}]</summary>` +
        `<div class="citation-body"><strong>${escapeHtml(c.title)}</strong>` +
        `<p>${escapeHtml(c.excerpt)}</p></div></details>`
    )
    .join("");
  return `<div class="citations">${markers}</div>`;
}

export function renderBubble(bubble: ChatBubble): string {
  if (bubble.role === "user") {
    return `<div class="bubble bubble-user">${escapeHtml(bubble.text)}</div>`;
  }
  const badge = bubble.scaffold ? renderScaffoldBadge(bubble.scaffold) : "";
  return (
    `<div class="bubble bubble-agent">${badge}` +
    `<div class="bubble-text">${escapeHtml(bubble.text)}</div>` +
    renderCitations(bubble.citations ?? []) +
    `</div>`
  );
}

export function renderMessages(state: ChatState): string {
  return state.bubbles.map(renderBubble).join("");
}

export function renderPendingCheck(check: PendingCheck | null): string {
  if (!check) {
    return "";
  }
  return (
    `<div class="pending-check">` +
    `<span class="pending-check-label">Check for step ${check.step_index}</span>` +
    `<p>${escapeHtml(check.question)}</p></div>`
  );
}

export function renderBanner(state: ChatState): string {
  switch (state.banner.kind) {
    case "none":
      return "";
    case "thinking":
      return `<div class="banner banner-info">The tutor is still thinking about your last message…</div>`;
    case "retry":
      return (
        `<div class="banner banner-error">The tutor could not answer: ` +
        `${escapeHtml(state.banner.message)} ` +
        `<button class="retry-button" data-action="retry">Retry</button></div>`
      );
    case "network":
      return (
        `<div class="banner banner-error">Connection problem: ` +
        `${escapeHtml(state.banner.message)}. Your message draft is preserved.</div>`
      );
  }
}
