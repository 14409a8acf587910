// Chat state machine: pure transitions, no DOM, no network. The send flow
// guarantees a failed turn never loses the learner's draft and that only
// one turn is in flight at a time (matching the server's 409 contract).

import type { AgentResponse, PendingCheck, PlanSnapshot, ScaffoldLevel } from "./types.js";
import type { CitationDetail } from "./types.js";

export interface ChatBubble {
  role: "user" | "agent";
  text: string;
  scaffold?: ScaffoldLevel;
  citations?: CitationDetail[];
}

export type Banner =
  | { kind: "none" }
  | { kind: "thinking" } // 409: a turn is already in flight
  | { kind: "retry"; message: string } // 502: provider failed, draft kept
  | { kind: "network"; message: string }; // transport failure, draft kept

export interface ChatState {
  sessionId: string | null;
  bubbles: ChatBubble[];
  draft: string;
  inFlight: boolean;
  banner: Banner;
  plan: PlanSnapshot | null;
  lastSeenRevision: number | null;
  scaffold: ScaffoldLevel | null;
  pendingCheck: PendingCheck | null;
  feedbackSubmitted: boolean;
}

export function initialState(): ChatState {
  return {
    sessionId: null,
    bubbles: [],
    draft: "",
    inFlight: false,
    banner: { kind: "none" },
    plan: null,
    lastSeenRevision: null,
    scaffold: null,
    pendingCheck: null,
    feedbackSubmitted: false,
  };
}

export function canSend(state: ChatState): boolean {
  return !state.inFlight && state.draft.trim().length > 0 && state.sessionId !== null;
}

/** Append the user bubble, lock the input, remember the draft for recovery. */
export function beginSend(state: ChatState): ChatState {
  if (!canSend(state)) {
    return state;
  }
  return {
    ...state,
    bubbles: [...state.bubbles, { role: "user", text: state.draft.trim() }],
    inFlight: true,
    banner: { kind: "none" },
  };
}

/** The plan sidebar shows a revision badge when the revision moved. */
export function revisionBumped(state: ChatState, plan: PlanSnapshot | null): boolean {
  return (
    plan !== null &&
    state.lastSeenRevision !== null &&
    plan.revision > state.lastSeenRevision
  );
}

export function applyResponse(state: ChatState, response: AgentResponse): ChatState {
  return {
    ...state,
    bubbles: [
      ...state.bubbles,
      {
        role: "agent",
        text: response.text,
        scaffold: response.scaffold_used,
        citations: response.citation_details ?? [],
      },
    ],
    draft: "",
    inFlight: false,
    banner: { kind: "none" },
    plan: response.plan_snapshot,
    lastSeenRevision: response.plan_snapshot?.revision ?? state.lastSeenRevision,
    scaffold: response.scaffold_used,
    pendingCheck: response.check,
  };
}

/** 409: the server is still working on an earlier turn. Draft preserved. */
export function applyTurnInFlight(state: ChatState): ChatState {
  return { ...state, inFlight: false, banner: { kind: "thinking" } };
}

/** 502 or other server failure: offer retry, keep the draft untouched. */
export function applyGatewayFailure(state: ChatState, message: string): ChatState {
  return {
    ...state,
    inFlight: false,
    banner: { kind: "retry", message },
    // the optimistic user bubble stays; the draft still holds the text
  };
}

/** Transport-level failure (offline, DNS, ...): banner + draft preserved. */
export function applyNetworkFailure(state: ChatState, message: string): ChatState {
  return { ...state, inFlight: false, banner: { kind: "network", message } };
}

export function setDraft(state: ChatState, draft: string): ChatState {
  return { ...state, draft };
}
