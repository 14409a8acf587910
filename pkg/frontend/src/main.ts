// DOM bootstrap: wires the pure state/render modules to the page. All
// tutoring logic lives server-side; this file only moves payloads around.

import { ApiClient, ApiError } from "./api.js";
import {
  applyGatewayFailure,
  applyNetworkFailure,
  applyResponse,
  applyTurnInFlight,
  beginSend,
  canSend,
  initialState,
  setDraft,
  type ChatState,
} from "./state.js";
import {
  renderBanner,
  renderMessages,
  renderPendingCheck,
  renderPlanSidebar,
  renderScaffoldBadge,
} from "./render.js";
import { buildFeedbackBody, hasAnyRating, rate, renderFeedbackWidget, type Ratings } from "./feedback.js";
import type { MetricName } from "./types.js";

const api = new ApiClient("");
let state: ChatState = initialState();
let ratings: Ratings = {};

function $(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el;
}

function render(): void {
  $("messages").innerHTML = renderMessages(state);
  $("plan").innerHTML = renderPlanSidebar(state);
  $("banner").innerHTML = renderBanner(state);
  $("pending-check").innerHTML = renderPendingCheck(state.pendingCheck);
  $("scaffold").innerHTML = state.scaffold ? renderScaffoldBadge(state.scaffold) : "";
  $("feedback").innerHTML = renderFeedbackWidget(ratings, state.feedbackSubmitted);
  const input = $("draft") as HTMLTextAreaElement;
  if (input.value !== state.draft) {
    input.value = state.draft;
  }
  input.disabled = state.inFlight;
  ($("send") as HTMLButtonElement).disabled = state.inFlight || !canSend(state);
  $("messages").scrollTop = $("messages").scrollHeight;
}

async function send(): Promise<void> {
  if (!canSend(state)) {
    return; // empty drafts are blocked client-side
  }
  const text = state.draft.trim();
  state = beginSend(state);
  render();
  try {
    const response = await api.sendMessage(state.sessionId!, text);
    state = applyResponse(state, response);
  } catch (err) {
    if (err instanceof ApiError && err.status === 409) {
      state = applyTurnInFlight(state);
    } else if (err instanceof ApiError) {
      state = applyGatewayFailure(state, err.message);
    } else {
      state = applyNetworkFailure(state, err instanceof Error ? err.message : String(err));
    }
  }
  render();
}

async function submitFeedback(freeText: string): Promise<void> {
  if (!state.sessionId || !hasAnyRating(ratings)) {
    return;
  }
  const body = buildFeedbackBody(ratings, freeText);
  try {
    await api.submitFeedback(state.sessionId, body.ratings, body.free_text);
    state = { ...state, feedbackSubmitted: true };
  } catch {
    // leave the widget up so the learner can retry
  }
  render();
}

async function boot(): Promise<void> {
  const { session_id } = await api.createSession(
    `web-${Date.now().toString(36)}`,
    "Student",
    "Occasional"
  );
  state = { ...state, sessionId: session_id };
  render();
}

document.addEventListener("DOMContentLoaded", () => {
  const input = $("draft") as HTMLTextAreaElement;
  input.addEventListener("input", () => {
    state = setDraft(state, input.value);
    ($("send") as HTMLButtonElement).disabled = state.inFlight || !canSend(state);
  });
  input.addEventListener("keydown", (event) => {
    if (event.key === "Enter" && !event.shiftKey) {
      event.preventDefault();
      void send();
    }
  });
  $("send").addEventListener("click", () => void send());
  $("banner").addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    if (target.dataset.action === "retry") {
      void send();
    }
  });
  $("feedback").addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    if (target.dataset.metric && target.dataset.stars) {
      ratings = rate(ratings, target.dataset.metric as MetricName, Number(target.dataset.stars));
      render();
    }
    if (target.dataset.action === "submit-feedback") {
      const text = document.querySelector<HTMLTextAreaElement>(".feedback-text")?.value ?? "";
      void submitFeedback(text);
    }
  });
  void boot();
});
